"""Independent brute-force reference implementations used only by tests.

These deliberately avoid the library's fast paths: direct summation,
double loops, finite differences. Slow and obviously correct.
"""

import cmath
import math

import numpy as np


def naive_dft(x):
    """O(N^2) discrete Fourier transform by direct summation."""
    x = list(x)
    n = len(x)
    out = []
    for k in range(n):
        acc = 0j
        for i, v in enumerate(x):
            acc += v * cmath.exp(-2j * cmath.pi * k * i / n)
        out.append(acc)
    return np.array(out)


def naive_dct_ii(values, n_out):
    """Orthonormal DCT-II by double loop."""
    v = list(values)
    n = len(v)
    out = []
    for k in range(n_out):
        scale = math.sqrt(1.0 / n) if k == 0 else math.sqrt(2.0 / n)
        acc = 0.0
        for i, x in enumerate(v):
            acc += x * math.cos(math.pi * k * (2 * i + 1) / (2 * n))
        out.append(scale * acc)
    return np.array(out)


def naive_idct_ii(coeffs):
    """Analytic inverse of the orthonormal DCT-II (i.e. DCT-III)."""
    c = list(coeffs)
    n = len(c)
    out = []
    for i in range(n):
        acc = math.sqrt(1.0 / n) * c[0]
        for k in range(1, n):
            acc += math.sqrt(2.0 / n) * c[k] * math.cos(math.pi * k * (2 * i + 1) / (2 * n))
        out.append(acc)
    return np.array(out)


def finite_difference_grads(loss_fn, params_dict, step=1e-5):
    """Central finite differences of loss_fn w.r.t. every tensor entry.

    params_dict maps name -> ndarray; the arrays are perturbed in place and
    restored. loss_fn takes no arguments and reads the live arrays.
    """
    grads = {}
    for name, arr in params_dict.items():
        g = np.zeros_like(arr)
        flat = arr.reshape(-1)
        gflat = g.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + step
            plus = loss_fn()
            flat[i] = orig - step
            minus = loss_fn()
            flat[i] = orig
            gflat[i] = (plus - minus) / (2.0 * step)
        grads[name] = g
    return grads


def max_relative_error(analytic, numeric, floor=1e-6):
    """Worst elementwise |a - n| / max(floor, |a|, |n|) over matching dicts."""
    worst = 0.0
    for name, a in analytic.items():
        n = numeric[name]
        denom = np.maximum(floor, np.maximum(np.abs(a), np.abs(n)))
        worst = max(worst, float(np.max(np.abs(a - n) / denom)))
    return worst


def tally_confusion(predictions, labels):
    """Per-pair confusion tally; positive class is label 1."""
    tp = tn = fp = fn = 0
    for p, y in zip(predictions, labels):
        if p == 1 and y == 1:
            tp += 1
        elif p == 0 and y == 0:
            tn += 1
        elif p == 1 and y == 0:
            fp += 1
        else:
            fn += 1
    return tp, tn, fp, fn
