"""Attention BiLSTM binary classifier with hand-derived gradients.

Forward math per timestep (sigmoid gates, tanh candidate):

    i = sig(W_i x + U_i h_prev + b_i)        f = sig(W_f x + U_f h_prev + b_f)
    g = tanh(W_c x + U_c h_prev + b_c)       o = sig(W_o x + U_o h_prev + b_o)
    C = f * C_prev + i * g                   h = o * tanh(C)

Two directions run over the sequence (the backward one over the reversed
input); their states are concatenated per step. Attention pools the
concatenated states with a learned context vector; the plain variant uses
the last state of each direction. A sigmoid head yields the probability
that the pronunciation is wrong (threshold 0.5).

Gradients are exact reverse-mode accumulation through the whole graph,
batched over sequences of equal length.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field

import numpy as np

PROB_CLIP_EPS = 1e-7
MODEL_MAGIC = b"ALSTM1"
MODEL_FORMAT_VERSION = 1

VARIANT_BILSTM = "bilstm"
VARIANT_ATTENTION = "attention_bilstm"
VARIANTS = (VARIANT_BILSTM, VARIANT_ATTENTION)

VERDICT_MISPRONOUNCED = "mispronounced"
VERDICT_CORRECT = "correct"

GATE_NAMES = ("i", "f", "c", "o")


class ModelFormatError(ValueError):
    """Raised when serialized model bytes are malformed."""


def sigmoid(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


@dataclass
class LstmParams:
    """One direction's weights: W_* act on the input, U_* on the recurrent state."""

    W_i: np.ndarray
    W_f: np.ndarray
    W_c: np.ndarray
    W_o: np.ndarray
    U_i: np.ndarray
    U_f: np.ndarray
    U_c: np.ndarray
    U_o: np.ndarray
    b_i: np.ndarray
    b_f: np.ndarray
    b_c: np.ndarray
    b_o: np.ndarray

    def __post_init__(self):
        h, d = self.W_i.shape
        for g in GATE_NAMES:
            if getattr(self, f"W_{g}").shape != (h, d):
                raise ValueError("inconsistent input weight shapes")
            if getattr(self, f"U_{g}").shape != (h, h):
                raise ValueError("inconsistent recurrent weight shapes")
            if getattr(self, f"b_{g}").shape != (h,):
                raise ValueError("inconsistent bias shapes")

    @property
    def hidden_dim(self) -> int:
        return self.W_i.shape[0]

    @property
    def input_dim(self) -> int:
        return self.W_i.shape[1]


@dataclass
class CellState:
    C: np.ndarray
    h: np.ndarray

    @classmethod
    def zeros(cls, hidden_dim: int) -> "CellState":
        return cls(C=np.zeros(hidden_dim), h=np.zeros(hidden_dim))


@dataclass
class AttentionParams:
    W_w: np.ndarray  # (d_a, 2H)
    b_w: np.ndarray  # (d_a,)
    u_w: np.ndarray  # (d_a,) learned context vector

    @property
    def d_a(self) -> int:
        return self.W_w.shape[0]


@dataclass
class OutputParams:
    W_z: np.ndarray  # (1, 2H)
    b_z: np.ndarray  # (1,)


@dataclass
class ModelParams:
    forward: LstmParams
    backward: LstmParams
    output: OutputParams
    variant: str
    attention: AttentionParams | None = None
    feature_fingerprint: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.forward.hidden_dim != self.backward.hidden_dim:
            raise ValueError("directions must share hidden_dim")
        if (self.attention is not None) != (self.variant == VARIANT_ATTENTION):
            raise ValueError("attention params present iff attention variant")

    @property
    def hidden_dim(self) -> int:
        return self.forward.hidden_dim

    @property
    def input_dim(self) -> int:
        return self.forward.input_dim

    def tensor_items(self) -> list[tuple[str, np.ndarray]]:
        """All trainable tensors in a fixed canonical order."""
        items = []
        for prefix, direction in (("fwd", self.forward), ("bwd", self.backward)):
            for kind in ("W", "U", "b"):
                for g in GATE_NAMES:
                    items.append((f"{prefix}.{kind}_{g}", getattr(direction, f"{kind}_{g}")))
        if self.attention is not None:
            items.append(("att.W_w", self.attention.W_w))
            items.append(("att.b_w", self.attention.b_w))
            items.append(("att.u_w", self.attention.u_w))
        items.append(("out.W_z", self.output.W_z))
        items.append(("out.b_z", self.output.b_z))
        return items

    def params_dict(self) -> dict[str, np.ndarray]:
        return dict(self.tensor_items())


def glorot_uniform(rng: np.random.Generator, shape: tuple[int, ...],
                   fan_in: int, fan_out: int) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


def init_lstm_params(rng: np.random.Generator, input_dim: int, hidden_dim: int) -> LstmParams:
    kw = {}
    for g in GATE_NAMES:
        kw[f"W_{g}"] = glorot_uniform(rng, (hidden_dim, input_dim), input_dim, hidden_dim)
    for g in GATE_NAMES:
        kw[f"U_{g}"] = glorot_uniform(rng, (hidden_dim, hidden_dim), hidden_dim, hidden_dim)
    for g in GATE_NAMES:
        # forget-gate bias 1.0 keeps early memory open; others start closed
        kw[f"b_{g}"] = np.full(hidden_dim, 1.0) if g == "f" else np.zeros(hidden_dim)
    return LstmParams(**kw)


def init_model(input_dim: int, hidden_dim: int, variant: str,
               rng: np.random.Generator, attention_dim: int | None = None,
               feature_fingerprint: str = "", meta: dict | None = None) -> ModelParams:
    """Seeded initialization; the draw order is fixed by tensor_items order."""
    fwd = init_lstm_params(rng, input_dim, hidden_dim)
    bwd = init_lstm_params(rng, input_dim, hidden_dim)
    attention = None
    if variant == VARIANT_ATTENTION:
        d_a = attention_dim if attention_dim is not None else 2 * hidden_dim
        attention = AttentionParams(
            W_w=glorot_uniform(rng, (d_a, 2 * hidden_dim), 2 * hidden_dim, d_a),
            b_w=np.zeros(d_a),
            u_w=glorot_uniform(rng, (d_a,), d_a, 1),
        )
    output = OutputParams(
        W_z=glorot_uniform(rng, (1, 2 * hidden_dim), 2 * hidden_dim, 1),
        b_z=np.zeros(1),
    )
    return ModelParams(forward=fwd, backward=bwd, output=output, variant=variant,
                       attention=attention, feature_fingerprint=feature_fingerprint,
                       meta=meta or {})


# ---------------------------------------------------------------------------
# forward passes


def lstm_cell_forward(x: np.ndarray, prev: CellState, p: LstmParams) -> CellState:
    """One LSTM step on a single input vector."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (p.input_dim,):
        raise ValueError(f"input shape {x.shape} != ({p.input_dim},)")
    if prev.C.shape != (p.hidden_dim,) or prev.h.shape != (p.hidden_dim,):
        raise ValueError("previous state shape mismatch")
    i = sigmoid(p.W_i @ x + p.U_i @ prev.h + p.b_i)
    f = sigmoid(p.W_f @ x + p.U_f @ prev.h + p.b_f)
    g = np.tanh(p.W_c @ x + p.U_c @ prev.h + p.b_c)
    C = f * prev.C + i * g
    o = sigmoid(p.W_o @ x + p.U_o @ prev.h + p.b_o)
    return CellState(C=C, h=o * np.tanh(C))


class _DirectionCache:
    """Activations of one direction over a batch, kept for backprop."""

    __slots__ = ("X", "i", "f", "g", "o", "C", "tC", "h")

    def __init__(self, X, i, f, g, o, C, tC, h):
        self.X, self.i, self.f, self.g, self.o = X, i, f, g, o
        self.C, self.tC, self.h = C, tC, h


def _direction_forward(X: np.ndarray, p: LstmParams) -> _DirectionCache:
    """Run one direction over X of shape (B, T, D) with zero initial state."""
    B, T, _ = X.shape
    H = p.hidden_dim
    i = np.empty((B, T, H)); f = np.empty((B, T, H))
    g = np.empty((B, T, H)); o = np.empty((B, T, H))
    C = np.empty((B, T, H)); tC = np.empty((B, T, H)); h = np.empty((B, T, H))
    h_prev = np.zeros((B, H))
    C_prev = np.zeros((B, H))
    for t in range(T):
        x_t = X[:, t]
        i[:, t] = sigmoid(x_t @ p.W_i.T + h_prev @ p.U_i.T + p.b_i)
        f[:, t] = sigmoid(x_t @ p.W_f.T + h_prev @ p.U_f.T + p.b_f)
        g[:, t] = np.tanh(x_t @ p.W_c.T + h_prev @ p.U_c.T + p.b_c)
        o[:, t] = sigmoid(x_t @ p.W_o.T + h_prev @ p.U_o.T + p.b_o)
        C[:, t] = f[:, t] * C_prev + i[:, t] * g[:, t]
        tC[:, t] = np.tanh(C[:, t])
        h[:, t] = o[:, t] * tC[:, t]
        h_prev = h[:, t]
        C_prev = C[:, t]
    return _DirectionCache(X, i, f, g, o, C, tC, h)


def bilstm_forward(x_seq: np.ndarray, fwd: LstmParams, bwd: LstmParams) -> np.ndarray:
    """Concatenated per-step states [h_fwd_t, h_bwd_t] for one sequence.

    The backward direction processes the reversed input; its state at
    position t therefore summarizes x_t..x_T.
    """
    x_seq = np.asarray(x_seq, dtype=np.float64)
    if x_seq.ndim != 2 or x_seq.shape[0] < 1:
        raise ValueError("x_seq must be a non-empty (T, input_dim) matrix")
    if fwd.hidden_dim != bwd.hidden_dim:
        raise ValueError("directions must share hidden_dim")
    X = x_seq[None, :, :]
    hf = _direction_forward(X, fwd).h[0]
    hb = _direction_forward(X[:, ::-1], bwd).h[0][::-1]
    return np.concatenate([hf, hb], axis=1)


def attention_forward(h_seq: np.ndarray, a: AttentionParams) -> tuple[np.ndarray, np.ndarray]:
    """Attention pooling of per-step states; returns (v, alpha).

    u_t = tanh(W_w h_t + b_w); scores are u_t . u_w; alpha is their softmax
    (max-subtracted for stability); v = sum_t alpha_t h_t.
    """
    h_seq = np.asarray(h_seq, dtype=np.float64)
    if h_seq.ndim != 2 or h_seq.shape[0] < 1:
        raise ValueError("h_seq must be a non-empty (T, 2*hidden) matrix")
    u = np.tanh(h_seq @ a.W_w.T + a.b_w)
    scores = u @ a.u_w
    shifted = np.exp(scores - scores.max())
    alpha = shifted / shifted.sum()
    return alpha @ h_seq, alpha


def _pool_batch(hcat: np.ndarray, m: ModelParams):
    """Pool (B, T, 2H) states to (B, 2H) per the model variant, with cache."""
    if m.variant == VARIANT_ATTENTION:
        a = m.attention
        u = np.tanh(hcat @ a.W_w.T + a.b_w)          # (B, T, d_a)
        scores = u @ a.u_w                            # (B, T)
        shifted = np.exp(scores - scores.max(axis=1, keepdims=True))
        alpha = shifted / shifted.sum(axis=1, keepdims=True)
        v = np.einsum("bt,btk->bk", alpha, hcat)
        return v, {"u": u, "alpha": alpha}
    H = m.hidden_dim
    # last computed state of each direction: forward at t=T, backward at t=1
    v = np.concatenate([hcat[:, -1, :H], hcat[:, 0, H:]], axis=1)
    return v, {}


def predict_probability(x_seq: np.ndarray, m: ModelParams) -> tuple[float, str]:
    """Score one feature matrix; verdict is mispronounced iff p >= 0.5."""
    x_seq = np.asarray(x_seq, dtype=np.float64)
    if x_seq.ndim != 2 or x_seq.shape[1] != m.input_dim:
        raise ValueError(f"expected (T, {m.input_dim}) features, got {x_seq.shape}")
    hcat = bilstm_forward(x_seq, m.forward, m.backward)
    v, _ = _pool_batch(hcat[None, :, :], m)
    z = float(v[0] @ m.output.W_z[0] + m.output.b_z[0])
    p = float(sigmoid(np.array([z]))[0])
    verdict = VERDICT_MISPRONOUNCED if p >= 0.5 else VERDICT_CORRECT
    return p, verdict


def weighted_bce(p: float, y: int, w: float) -> float:
    """Cost-weighted binary cross-entropy with probability clipping."""
    if w <= 0:
        raise ValueError("weight must be positive")
    p = min(max(p, PROB_CLIP_EPS), 1.0 - PROB_CLIP_EPS)
    return -w * (y * np.log(p) + (1 - y) * np.log(1.0 - p))


# ---------------------------------------------------------------------------
# backward pass


def _direction_backward(cache: _DirectionCache, p: LstmParams,
                        dh_inject: np.ndarray, grads: dict[str, np.ndarray],
                        prefix: str) -> None:
    """Reverse accumulation through one direction.

    dh_inject (B, T, H) holds the loss gradient arriving at each step's
    state from the layers above; recurrent gradient flows are added here.
    """
    B, T, H = cache.h.shape
    dh_next = np.zeros((B, H))
    dC_next = np.zeros((B, H))
    dW = {g: grads[f"{prefix}.W_{g}"] for g in GATE_NAMES}
    dU = {g: grads[f"{prefix}.U_{g}"] for g in GATE_NAMES}
    db = {g: grads[f"{prefix}.b_{g}"] for g in GATE_NAMES}
    for t in range(T - 1, -1, -1):
        i, f, g, o = cache.i[:, t], cache.f[:, t], cache.g[:, t], cache.o[:, t]
        tC = cache.tC[:, t]
        dh = dh_inject[:, t] + dh_next
        dC = dC_next + dh * o * (1.0 - tC * tC)
        C_prev = cache.C[:, t - 1] if t > 0 else np.zeros((B, H))
        h_prev = cache.h[:, t - 1] if t > 0 else np.zeros((B, H))
        da = {
            "o": dh * tC * o * (1.0 - o),
            "f": dC * C_prev * f * (1.0 - f),
            "i": dC * g * i * (1.0 - i),
            "c": dC * i * (1.0 - g * g),
        }
        x_t = cache.X[:, t]
        dh_next = np.zeros((B, H))
        for gate in GATE_NAMES:
            dW[gate] += da[gate].T @ x_t
            dU[gate] += da[gate].T @ h_prev
            db[gate] += da[gate].sum(axis=0)
            dh_next += da[gate] @ getattr(p, f"U_{gate}")
        dC_next = dC * f


def _zero_grads(m: ModelParams) -> dict[str, np.ndarray]:
    return {name: np.zeros_like(arr) for name, arr in m.tensor_items()}


def backward_pass(batch: list[tuple[np.ndarray, int, float]],
                  m: ModelParams) -> tuple[float, dict[str, np.ndarray]]:
    """Mean weighted loss over the batch and its exact parameter gradients.

    Each item is (feature matrix (T, D), label in {0, 1}, positive weight).
    Sequences of equal length are processed together; the mean is over the
    whole batch regardless of grouping.
    """
    if not batch:
        raise ValueError("empty batch")
    n_total = len(batch)
    H = m.hidden_dim
    grads = _zero_grads(m)
    total_loss = 0.0

    by_len: dict[int, list[int]] = {}
    for idx, (x, _, _) in enumerate(batch):
        x = np.asarray(x)
        if x.ndim != 2 or x.shape[1] != m.input_dim:
            raise ValueError(f"batch item {idx}: expected (T, {m.input_dim}) features")
        by_len.setdefault(x.shape[0], []).append(idx)

    for T, indices in sorted(by_len.items()):
        X = np.stack([np.asarray(batch[i][0], dtype=np.float64) for i in indices])
        y = np.array([batch[i][1] for i in indices], dtype=np.float64)
        w = np.array([batch[i][2] for i in indices], dtype=np.float64)

        cf = _direction_forward(X, m.forward)
        cb = _direction_forward(X[:, ::-1], m.backward)
        hcat = np.concatenate([cf.h, cb.h[:, ::-1]], axis=2)
        v, pool_cache = _pool_batch(hcat, m)
        z = v @ m.output.W_z[0] + m.output.b_z[0]
        p_raw = sigmoid(z)
        p = np.clip(p_raw, PROB_CLIP_EPS, 1.0 - PROB_CLIP_EPS)
        losses = -w * (y * np.log(p) + (1.0 - y) * np.log(1.0 - p))
        total_loss += losses.sum()

        # d loss / d z; zero where the clip flattened the loss
        unclipped = (p_raw > PROB_CLIP_EPS) & (p_raw < 1.0 - PROB_CLIP_EPS)
        dz = np.where(unclipped, w * (p_raw - y), 0.0) / n_total

        grads["out.W_z"] += (dz[None, :] @ v)
        grads["out.b_z"] += dz.sum(keepdims=True)
        dv = dz[:, None] * m.output.W_z[0][None, :]

        if m.variant == VARIANT_ATTENTION:
            a = m.attention
            u, alpha = pool_cache["u"], pool_cache["alpha"]
            dalpha = np.einsum("bk,btk->bt", dv, hcat)
            dh_cat = alpha[:, :, None] * dv[:, None, :]
            ds = alpha * (dalpha - (alpha * dalpha).sum(axis=1, keepdims=True))
            du = ds[:, :, None] * a.u_w[None, None, :]
            grads["att.u_w"] += np.einsum("bt,btk->k", ds, u)
            da_u = du * (1.0 - u * u)
            grads["att.W_w"] += np.einsum("btk,btj->kj", da_u, hcat)
            grads["att.b_w"] += da_u.sum(axis=(0, 1))
            dh_cat = dh_cat + da_u @ a.W_w
        else:
            dh_cat = np.zeros_like(hcat)
            dh_cat[:, -1, :H] = dv[:, :H]
            dh_cat[:, 0, H:] = dv[:, H:]

        _direction_backward(cf, m.forward, dh_cat[:, :, :H], grads, "fwd")
        _direction_backward(cb, m.backward, dh_cat[:, ::-1, H:], grads, "bwd")

    return total_loss / n_total, grads


# ---------------------------------------------------------------------------
# optimization


@dataclass(frozen=True)
class AdamConfig:
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8


class AdamState:
    """First/second moment estimates, one pair per tensor."""

    def __init__(self, params: dict[str, np.ndarray]):
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}


def adam_step(params: dict[str, np.ndarray], grads: dict[str, np.ndarray],
              state: AdamState, t: int, cfg: AdamConfig = AdamConfig()):
    """One Adam update, in place. t is the 1-based step index."""
    if t < 1:
        raise ValueError("step index must be >= 1")
    for name, g in grads.items():
        if not np.all(np.isfinite(g)):
            raise ValueError(f"non-finite gradient in {name}")
    bc1 = 1.0 - cfg.beta1**t
    bc2 = 1.0 - cfg.beta2**t
    for name, theta in params.items():
        g = grads[name]
        m = state.m[name]
        v = state.v[name]
        m *= cfg.beta1
        m += (1.0 - cfg.beta1) * g
        v *= cfg.beta2
        v += (1.0 - cfg.beta2) * g * g
        theta -= cfg.learning_rate * (m / bc1) / (np.sqrt(v / bc2) + cfg.eps)
    return params, state


def clip_gradients_global_norm(grads: dict[str, np.ndarray], max_norm: float) -> float:
    """Scale all gradients so their global L2 norm is at most max_norm."""
    total = np.sqrt(sum(float(np.sum(g * g)) for g in grads.values()))
    if total > max_norm and total > 0.0:
        scale = max_norm / total
        for g in grads.values():
            g *= scale
    return total


# ---------------------------------------------------------------------------
# serialization


def serialize_model(m: ModelParams) -> bytes:
    """Binary encoding: magic, version, JSON metadata, then named tensors.

    Tensor payloads are float64 little-endian, row-major; the round trip is
    bit-exact.
    """
    meta = {
        "variant": m.variant,
        "input_dim": m.input_dim,
        "hidden_dim": m.hidden_dim,
        "attention_dim": m.attention.d_a if m.attention is not None else None,
        "feature_fingerprint": m.feature_fingerprint,
        "meta": m.meta,
    }
    meta_bytes = json.dumps(meta, sort_keys=True).encode("utf-8")
    out = bytearray()
    out += MODEL_MAGIC
    out += struct.pack("<I", MODEL_FORMAT_VERSION)
    out += struct.pack("<I", len(meta_bytes))
    out += meta_bytes
    items = m.tensor_items()
    out += struct.pack("<I", len(items))
    for name, arr in items:
        name_b = name.encode("utf-8")
        out += struct.pack("<H", len(name_b))
        out += name_b
        out += struct.pack("<B", arr.ndim)
        for dim in arr.shape:
            out += struct.pack("<I", dim)
        out += np.ascontiguousarray(arr, dtype="<f8").tobytes()
    return bytes(out)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise ModelFormatError("unexpected end of data")
        chunk = self.data[self.pos : self.pos + n]
        self.pos += n
        return chunk

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]

    def u16(self) -> int:
        return struct.unpack("<H", self.take(2))[0]

    def u8(self) -> int:
        return self.take(1)[0]


def deserialize_model(data: bytes) -> ModelParams:
    r = _Reader(data)
    if r.take(len(MODEL_MAGIC)) != MODEL_MAGIC:
        raise ModelFormatError("bad magic")
    version = r.u32()
    if version != MODEL_FORMAT_VERSION:
        raise ModelFormatError(f"unsupported format version {version}")
    try:
        meta = json.loads(r.take(r.u32()).decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ModelFormatError(f"corrupt metadata block: {exc}") from exc

    tensors: dict[str, np.ndarray] = {}
    for _ in range(r.u32()):
        name = r.take(r.u16()).decode("utf-8")
        rank = r.u8()
        shape = tuple(r.u32() for _ in range(rank))
        count = int(np.prod(shape)) if shape else 1
        raw = r.take(8 * count)
        tensors[name] = np.frombuffer(raw, dtype="<f8").reshape(shape).copy()

    variant = meta.get("variant")
    if variant not in VARIANTS:
        raise ModelFormatError(f"unknown variant {variant!r}")

    def grab(name: str, shape: tuple[int, ...]) -> np.ndarray:
        if name not in tensors:
            raise ModelFormatError(f"shape table inconsistent: missing tensor {name}")
        arr = tensors.pop(name)
        if arr.shape != shape:
            raise ModelFormatError(
                f"shape table inconsistent: {name} has {arr.shape}, want {shape}"
            )
        return arr

    h, d = meta["hidden_dim"], meta["input_dim"]
    directions = {}
    for prefix in ("fwd", "bwd"):
        kw = {}
        for g in GATE_NAMES:
            kw[f"W_{g}"] = grab(f"{prefix}.W_{g}", (h, d))
            kw[f"U_{g}"] = grab(f"{prefix}.U_{g}", (h, h))
            kw[f"b_{g}"] = grab(f"{prefix}.b_{g}", (h,))
        directions[prefix] = LstmParams(**kw)
    attention = None
    if variant == VARIANT_ATTENTION:
        d_a = meta["attention_dim"]
        attention = AttentionParams(
            W_w=grab("att.W_w", (d_a, 2 * h)),
            b_w=grab("att.b_w", (d_a,)),
            u_w=grab("att.u_w", (d_a,)),
        )
    output = OutputParams(W_z=grab("out.W_z", (1, 2 * h)), b_z=grab("out.b_z", (1,)))
    if tensors:
        raise ModelFormatError(
            f"shape table inconsistent: unexpected tensors {sorted(tensors)}"
        )
    return ModelParams(forward=directions["fwd"], backward=directions["bwd"],
                       output=output, variant=variant, attention=attention,
                       feature_fingerprint=meta.get("feature_fingerprint", ""),
                       meta=meta.get("meta", {}))
