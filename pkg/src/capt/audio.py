"""Audio ingestion: WAV parsing, resampling, padding, dataset manifests.

Everything operates on mono float64 waveforms. 16 kHz is the canonical
rate; all downstream frame arithmetic assumes it.
"""

from __future__ import annotations

import csv
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

CANONICAL_RATE = 16000

LABEL_CORRECT = "correct"
LABEL_MISPRONOUNCED = "mispronounced"
VALID_LABELS = (LABEL_CORRECT, LABEL_MISPRONOUNCED)

MANIFEST_COLUMNS = ["path", "word_id", "label", "speaker_id"]


class WavFormatError(ValueError):
    """Raised when WAV bytes cannot be decoded as 16-bit PCM RIFF/WAVE."""


class ManifestError(ValueError):
    """Raised when a dataset manifest file is malformed."""


@dataclass
class AudioClip:
    """Mono waveform with its sample rate.

    samples: float64 amplitudes, nominal range [-1, 1], non-empty and finite.
    """

    samples: np.ndarray
    sample_rate_hz: int

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 1 or self.samples.size == 0:
            raise ValueError("audio clip must be a non-empty 1-D sample array")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("audio clip contains non-finite samples")
        if self.sample_rate_hz <= 0:
            raise ValueError("sample rate must be positive")

    def __len__(self) -> int:
        return int(self.samples.size)

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.sample_rate_hz


@dataclass(frozen=True)
class ManifestEntry:
    path: str
    word_id: str
    label: str
    speaker_id: str

    def __post_init__(self):
        if self.label not in VALID_LABELS:
            raise ValueError(f"unknown label {self.label!r}")
        if not self.word_id or not self.speaker_id:
            raise ValueError("word_id and speaker_id must be non-empty")


@dataclass
class DatasetManifest:
    entries: list[ManifestEntry] = field(default_factory=list)

    def word_ids(self) -> list[str]:
        """Word ids in order of first appearance."""
        seen: dict[str, None] = {}
        for e in self.entries:
            seen.setdefault(e.word_id, None)
        return list(seen)

    def entries_for_word(self, word_id: str) -> list[ManifestEntry]:
        return [e for e in self.entries if e.word_id == word_id]


def parse_wav(data: bytes) -> AudioClip:
    """Decode RIFF/WAVE bytes (PCM, 16-bit, mono or stereo) to an AudioClip.

    16-bit samples are scaled by 1/32768; stereo is averaged to mono.
    The header sample rate is kept as-is (no resampling here).
    """
    if len(data) < 12 or data[0:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise WavFormatError("not a RIFF/WAVE file")

    fmt = None
    pcm = None
    pos = 12
    while pos + 8 <= len(data):
        chunk_id = data[pos : pos + 4]
        (chunk_size,) = struct.unpack_from("<I", data, pos + 4)
        body = data[pos + 8 : pos + 8 + chunk_size]
        if chunk_id == b"fmt ":
            if len(body) < 16:
                raise WavFormatError("fmt chunk too short")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
        elif chunk_id == b"data":
            if len(body) < chunk_size:
                raise WavFormatError("data chunk truncated")
            pcm = body
        pos += 8 + chunk_size + (chunk_size & 1)  # chunks are word-aligned

    if fmt is None:
        raise WavFormatError("missing fmt chunk")
    if pcm is None:
        raise WavFormatError("missing data chunk")

    audio_format, channels, sample_rate, _byte_rate, _block_align, bits = fmt
    if audio_format != 1:
        raise WavFormatError(f"unsupported encoding (format tag {audio_format}, want PCM)")
    if bits != 16:
        raise WavFormatError(f"unsupported bit depth {bits} (want 16)")
    if channels not in (1, 2):
        raise WavFormatError(f"unsupported channel count {channels}")

    frame_bytes = 2 * channels
    if len(pcm) % frame_bytes != 0:
        raise WavFormatError("data chunk size is not a whole number of sample frames")
    if len(pcm) == 0:
        raise WavFormatError("empty data chunk")

    raw = np.frombuffer(pcm, dtype="<i2").astype(np.float64) / 32768.0
    if channels == 2:
        raw = raw.reshape(-1, 2).mean(axis=1)
    return AudioClip(samples=raw, sample_rate_hz=int(sample_rate))


def write_wav(clip: AudioClip) -> bytes:
    """Encode a clip as mono 16-bit PCM WAV bytes.

    Values straight out of parse_wav round-trip exactly; anything else is
    rounded to the nearest 16-bit level and clamped to full scale.
    """
    quantized = np.clip(np.rint(clip.samples * 32768.0), -32768, 32767).astype("<i2")
    pcm = quantized.tobytes()
    header = b"RIFF" + struct.pack("<I", 36 + len(pcm)) + b"WAVE"
    header += b"fmt " + struct.pack("<IHHIIHH", 16, 1, 1, clip.sample_rate_hz,
                                    clip.sample_rate_hz * 2, 2, 16)
    header += b"data" + struct.pack("<I", len(pcm))
    return header + pcm


def resample_to_16k(clip: AudioClip) -> AudioClip:
    """Linear-interpolation resample to 16 kHz.

    Output length is round(len * 16000 / rate). Rates below 8 kHz are
    rejected: they cannot carry the speech band.
    """
    if clip.sample_rate_hz < 8000:
        raise ValueError(
            f"sample rate {clip.sample_rate_hz} Hz below 8000 Hz: insufficient bandwidth"
        )
    if clip.sample_rate_hz == CANONICAL_RATE:
        return clip

    n_in = len(clip)
    n_out = int(round(n_in * CANONICAL_RATE / clip.sample_rate_hz))
    if n_out < 1:
        raise ValueError("clip too short to resample")
    # Output sample i sits at time i / 16000, i.e. input position i * rate / 16000.
    positions = np.arange(n_out) * (clip.sample_rate_hz / CANONICAL_RATE)
    resampled = np.interp(positions, np.arange(n_in), clip.samples)
    return AudioClip(samples=resampled, sample_rate_hz=CANONICAL_RATE)


def pad_clips(clips: list[AudioClip], target_len: int | None = None) -> list[AudioClip]:
    """Zero-pad every clip at the tail to a common length.

    Default target is the longest clip in the list. Truncation is never
    performed; a target shorter than the longest clip is an error.
    """
    if not clips:
        return []
    for c in clips:
        if c.sample_rate_hz != CANONICAL_RATE:
            raise ValueError("pad_clips expects clips at 16 kHz")
    max_len = max(len(c) for c in clips)
    if target_len is None:
        target_len = max_len
    elif target_len < max_len:
        raise ValueError(
            f"target length {target_len} is shorter than longest clip ({max_len}); "
            "truncation is not permitted"
        )
    out = []
    for c in clips:
        if len(c) == target_len:
            out.append(c)
        else:
            padded = np.zeros(target_len, dtype=np.float64)
            padded[: len(c)] = c.samples
            out.append(AudioClip(samples=padded, sample_rate_hz=CANONICAL_RATE))
    return out


def load_manifest(path: str | Path) -> DatasetManifest:
    """Load a labeled audio inventory from a CSV manifest.

    Format: UTF-8, header `path,word_id,label,speaker_id`, label one of
    {correct, mispronounced}. Relative audio paths are resolved against the
    manifest's directory and must exist.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from exc

    rows = list(csv.reader(text.splitlines()))
    rows = [r for r in rows if r and any(cell.strip() for cell in r)]
    if not rows:
        raise ManifestError("empty manifest")
    header = [c.strip() for c in rows[0]]
    if header != MANIFEST_COLUMNS:
        raise ManifestError(
            f"bad header {header!r}, expected {','.join(MANIFEST_COLUMNS)}"
        )
    if len(rows) == 1:
        raise ManifestError("empty manifest")

    entries: list[ManifestEntry] = []
    seen_paths: set[str] = set()
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(MANIFEST_COLUMNS):
            raise ManifestError(f"row {lineno}: expected {len(MANIFEST_COLUMNS)} columns, got {len(row)}")
        raw_path, word_id, label, speaker_id = (c.strip() for c in row)
        if label not in VALID_LABELS:
            raise ManifestError(f"row {lineno}: unknown label {label!r}")
        if not word_id:
            raise ManifestError(f"row {lineno}: empty word_id")
        if not speaker_id:
            raise ManifestError(f"row {lineno}: empty speaker_id")
        resolved = Path(raw_path)
        if not resolved.is_absolute():
            resolved = path.parent / resolved
        if not resolved.exists():
            raise ManifestError(f"row {lineno}: audio file not found: {raw_path}")
        resolved_str = str(resolved)
        if resolved_str in seen_paths:
            raise ManifestError(f"row {lineno}: duplicate path {raw_path}")
        seen_paths.add(resolved_str)
        entries.append(ManifestEntry(path=resolved_str, word_id=word_id,
                                     label=label, speaker_id=speaker_id))
    return DatasetManifest(entries=entries)


def load_clip(path: str | Path) -> AudioClip:
    """Read a WAV file and normalize it to the canonical 16 kHz rate."""
    data = Path(path).read_bytes()
    return resample_to_16k(parse_wav(data))
