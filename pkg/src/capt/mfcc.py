"""MFCC feature extraction, built from first principles.

Chain: pre-emphasis -> Hamming frames -> radix-2 FFT power spectrum ->
triangular mel filterbank -> log -> orthonormal DCT-II, keeping the first
n_coeffs coefficients (c_0 included). Every stage is deterministic, so the
whole extraction is bit-reproducible.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass

import numpy as np

from .audio import AudioClip


@dataclass(frozen=True)
class MfccConfig:
    pre_emphasis_alpha: float = 0.97
    frame_len_ms: float = 25.0
    hop_ms: float = 10.0
    fft_size: int = 512
    n_mels: int = 26
    n_coeffs: int = 20
    log_floor: float = 1e-10
    sample_rate_hz: int = 16000

    def __post_init__(self):
        if not 0.0 <= self.pre_emphasis_alpha < 1.0:
            raise ValueError("pre_emphasis_alpha must be in [0, 1)")
        if self.fft_size < 1 or self.fft_size & (self.fft_size - 1):
            raise ValueError("fft_size must be a power of two")
        if self.fft_size < self.frame_len:
            raise ValueError("fft_size must be at least the frame length in samples")
        if not 1 <= self.n_coeffs <= self.n_mels:
            raise ValueError("n_coeffs must be in [1, n_mels]")
        if self.log_floor <= 0.0:
            raise ValueError("log_floor must be positive")

    @property
    def frame_len(self) -> int:
        """Analysis window length in samples (400 at defaults)."""
        return int(round(self.frame_len_ms * self.sample_rate_hz / 1000.0))

    @property
    def hop(self) -> int:
        """Hop between frame starts in samples (160 at defaults)."""
        return int(round(self.hop_ms * self.sample_rate_hz / 1000.0))

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "MfccConfig":
        return cls(**d)

    def fingerprint(self) -> str:
        """Stable digest of the feature configuration.

        Stored inside trained models so serving can refuse to score with a
        drifted feature setup.
        """
        canonical = json.dumps(self.to_dict(), sort_keys=True)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def pre_emphasize(samples: np.ndarray, alpha: float) -> np.ndarray:
    """First-order high-pass: y[0] = x[0], y[n] = x[n] - alpha * x[n-1]."""
    x = np.asarray(samples, dtype=np.float64)
    if x.size == 0:
        raise ValueError("empty input")
    y = np.empty_like(x)
    y[0] = x[0]
    y[1:] = x[1:] - alpha * x[:-1]
    return y


def hamming_window(n: int) -> np.ndarray:
    """w[k] = 0.54 - 0.46 cos(2 pi k / (n - 1))."""
    if n == 1:
        return np.array([0.08])
    k = np.arange(n)
    return 0.54 - 0.46 * np.cos(2.0 * np.pi * k / (n - 1))


def frame_and_window(samples: np.ndarray, cfg: MfccConfig) -> np.ndarray:
    """Slice into Hamming-windowed frames of cfg.frame_len every cfg.hop.

    Returns a (T, frame_len) array with T = 1 + floor((L - W) / H).
    A trailing partial frame is discarded.
    """
    x = np.asarray(samples, dtype=np.float64)
    w, h = cfg.frame_len, cfg.hop
    if x.size < w:
        raise ValueError(f"clip too short: {x.size} samples < one {w}-sample window")
    n_frames = 1 + (x.size - w) // h
    idx = np.arange(w)[None, :] + h * np.arange(n_frames)[:, None]
    return x[idx] * hamming_window(w)[None, :]


_BIT_REVERSAL_CACHE: dict[int, np.ndarray] = {}


def _bit_reversal(n: int) -> np.ndarray:
    perm = _BIT_REVERSAL_CACHE.get(n)
    if perm is None:
        bits = n.bit_length() - 1
        perm = np.zeros(n, dtype=np.intp)
        for i in range(1, n):
            perm[i] = (perm[i >> 1] >> 1) | ((i & 1) << (bits - 1))
        _BIT_REVERSAL_CACHE[n] = perm
    return perm


def fft_radix2(x: np.ndarray) -> np.ndarray:
    """Iterative radix-2 decimation-in-time FFT over the last axis.

    Accepts real or complex input whose last dimension is a power of two;
    batches over any leading dimensions.
    """
    a = np.asarray(x, dtype=np.complex128).copy()
    n = a.shape[-1]
    if n == 0 or n & (n - 1):
        raise ValueError("fft length must be a power of two")
    if n == 1:
        return a
    a = a[..., _bit_reversal(n)]
    m = 2
    while m <= n:
        half = m // 2
        twiddle = np.exp(-2j * np.pi * np.arange(half) / m)
        blocks = a.reshape(a.shape[:-1] + (n // m, m))
        even = blocks[..., :half]
        odd = blocks[..., half:] * twiddle
        a = np.concatenate([even + odd, even - odd], axis=-1).reshape(a.shape)
        m *= 2
    return a


def power_spectrum(frame: np.ndarray, fft_size: int) -> np.ndarray:
    """|FFT|^2 / fft_size for bins 0..fft_size/2, zero-padding the frame.

    Batches over leading dimensions: (T, W) in -> (T, fft_size/2 + 1) out.
    """
    x = np.asarray(frame, dtype=np.float64)
    if fft_size < 1 or fft_size & (fft_size - 1):
        raise ValueError("fft_size must be a power of two")
    if x.shape[-1] > fft_size:
        raise ValueError("frame longer than fft_size")
    if x.shape[-1] < fft_size:
        pad = [(0, 0)] * (x.ndim - 1) + [(0, fft_size - x.shape[-1])]
        x = np.pad(x, pad)
    spectrum = fft_radix2(x)[..., : fft_size // 2 + 1]
    return (spectrum.real**2 + spectrum.imag**2) / fft_size


def hz_to_mel(f):
    """2595 * log10(1 + f / 700)."""
    f = np.asarray(f, dtype=np.float64)
    if np.any(f < 0):
        raise ValueError("frequency must be non-negative")
    out = 2595.0 * np.log10(1.0 + f / 700.0)
    return float(out) if out.ndim == 0 else out


def mel_to_hz(m):
    """Exact inverse of hz_to_mel."""
    m = np.asarray(m, dtype=np.float64)
    if np.any(m < 0):
        raise ValueError("mel value must be non-negative")
    out = 700.0 * (10.0 ** (m / 2595.0) - 1.0)
    return float(out) if out.ndim == 0 else out


def build_mel_filterbank(cfg: MfccConfig) -> np.ndarray:
    """Triangular filters on mel-equal centers between 0 Hz and Nyquist.

    Returns (n_mels, fft_size/2 + 1). Filter m rises linearly from boundary
    point m-1 to its center and falls to boundary m+1, evaluated at each
    FFT bin's frequency; all weights lie in [0, 1].
    """
    n_bins = cfg.fft_size // 2 + 1
    boundaries_mel = np.linspace(0.0, hz_to_mel(cfg.sample_rate_hz / 2.0), cfg.n_mels + 2)
    boundaries_hz = mel_to_hz(boundaries_mel)
    bin_freqs = np.arange(n_bins) * cfg.sample_rate_hz / cfg.fft_size

    fb = np.zeros((cfg.n_mels, n_bins))
    for m in range(cfg.n_mels):
        lower, center, upper = boundaries_hz[m : m + 3]
        rising = (bin_freqs - lower) / (center - lower)
        falling = (upper - bin_freqs) / (upper - center)
        fb[m] = np.clip(np.minimum(rising, falling), 0.0, 1.0)
        if not np.any(fb[m] > 0.0):
            raise ValueError(
                f"mel filter {m} has no FFT bin support; "
                "reduce n_mels or increase fft_size"
            )
    return fb


def log_mel(mel_energies: np.ndarray, log_floor: float) -> np.ndarray:
    """Natural log with a floor absorbing zero energies."""
    e = np.asarray(mel_energies, dtype=np.float64)
    if np.any(e < 0):
        raise ValueError("mel energies must be non-negative")
    return np.log(np.maximum(e, log_floor))


def _dct_basis(n: int, n_out: int) -> np.ndarray:
    """Orthonormal DCT-II basis, rows k = 0..n_out-1."""
    k = np.arange(n_out)[:, None]
    n_idx = np.arange(n)[None, :]
    basis = np.cos(np.pi * k * (2 * n_idx + 1) / (2 * n))
    scale = np.full((n_out, 1), np.sqrt(2.0 / n))
    scale[0, 0] = np.sqrt(1.0 / n)
    return scale * basis


def dct_ii(values: np.ndarray, n_out: int) -> np.ndarray:
    """Orthonormal DCT-II, first n_out coefficients (c_0 included).

    Batches over leading dimensions of `values`.
    """
    v = np.asarray(values, dtype=np.float64)
    n = v.shape[-1]
    if not 1 <= n_out <= n:
        raise ValueError(f"n_out must be in [1, {n}]")
    return v @ _dct_basis(n, n_out).T


def extract_mfcc(clip: AudioClip, cfg: MfccConfig = MfccConfig()) -> np.ndarray:
    """Full feature chain for one clip: returns a (T, n_coeffs) matrix."""
    if clip.sample_rate_hz != cfg.sample_rate_hz:
        raise ValueError(
            f"clip rate {clip.sample_rate_hz} != config rate {cfg.sample_rate_hz}"
        )
    emphasized = pre_emphasize(clip.samples, cfg.pre_emphasis_alpha)
    frames = frame_and_window(emphasized, cfg)
    spectra = power_spectrum(frames, cfg.fft_size)
    mel_energies = spectra @ build_mel_filterbank(cfg).T
    return dct_ii(log_mel(mel_energies, cfg.log_floor), cfg.n_coeffs)
