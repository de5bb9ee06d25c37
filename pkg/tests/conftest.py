import numpy as np
import pytest

from capt.audio import CANONICAL_RATE, AudioClip, write_wav


def make_tone(freq_hz, seconds=0.5, sr=CANONICAL_RATE, amp=0.5, noise_std=0.0,
              phase=0.0, rng=None):
    """Synthesize a (optionally noisy) sine tone clip."""
    n = int(round(seconds * sr))
    t = np.arange(n) / sr
    samples = amp * np.sin(2 * np.pi * freq_hz * t + phase)
    if noise_std > 0.0:
        if rng is None:
            rng = np.random.default_rng(0)
        samples = samples + rng.normal(0.0, noise_std, size=n)
    return AudioClip(samples=np.clip(samples, -1.0, 1.0), sample_rate_hz=sr)


def make_tone_dataset(dirpath, freq_by_label, n_per_class, seconds=0.5,
                      word_id="w1", seed=1234):
    """Write noisy tone WAVs to disk and return manifest rows for them.

    freq_by_label maps 'correct'/'mispronounced' to a base frequency.
    Each clip gets random phase, amplitude jitter, and additive noise.
    """
    rng = np.random.default_rng(seed)
    rows = []
    for label, freq in freq_by_label.items():
        for k in range(n_per_class):
            clip = make_tone(
                freq,
                seconds=seconds,
                amp=0.3 + 0.3 * rng.random(),
                noise_std=0.05,
                phase=2 * np.pi * rng.random(),
                rng=rng,
            )
            name = f"{word_id}_{label}_{k}.wav"
            (dirpath / name).write_bytes(write_wav(clip))
            rows.append((name, word_id, label, f"spk{k % 4}"))
    return rows


def write_manifest(dirpath, rows):
    lines = ["path,word_id,label,speaker_id"]
    lines += [",".join(r) for r in rows]
    p = dirpath / "manifest.csv"
    p.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return p


@pytest.fixture
def tone_clip():
    return make_tone(440.0)
