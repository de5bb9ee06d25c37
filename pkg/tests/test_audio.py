import struct

import numpy as np
import pytest

from capt.audio import (
    CANONICAL_RATE,
    AudioClip,
    ManifestError,
    WavFormatError,
    load_clip,
    load_manifest,
    pad_clips,
    parse_wav,
    resample_to_16k,
    write_wav,
)


def wav_header(channels=1, sample_rate=16000, bits=16, data_len=0, fmt_tag=1):
    h = b"RIFF" + struct.pack("<I", 36 + data_len) + b"WAVE"
    h += b"fmt " + struct.pack("<IHHIIHH", 16, fmt_tag, channels, sample_rate,
                               sample_rate * channels * bits // 8,
                               channels * bits // 8, bits)
    h += b"data" + struct.pack("<I", data_len)
    return h


class TestParseWav:
    def test_mono_16k_2000_bytes_gives_1000_samples(self):
        data = bytes(2000)
        clip = parse_wav(wav_header(data_len=2000) + data)
        assert len(clip) == 1000
        assert clip.sample_rate_hz == 16000

    def test_all_zero_data_gives_all_zero_samples(self):
        clip = parse_wav(wav_header(data_len=400) + bytes(400))
        assert np.all(clip.samples == 0.0)

    def test_non_pcm_format_tag_rejected(self):
        blob = wav_header(data_len=4, fmt_tag=3) + bytes(4)
        with pytest.raises(WavFormatError, match="unsupported encoding"):
            parse_wav(blob)

    def test_scaling_is_1_over_32768(self):
        pcm = struct.pack("<4h", 32767, -32768, 16384, 0)
        clip = parse_wav(wav_header(data_len=8) + pcm)
        expected = np.array([32767, -32768, 16384, 0]) / 32768.0
        np.testing.assert_array_equal(clip.samples, expected)

    def test_stereo_averaged_to_mono(self):
        pcm = struct.pack("<4h", 1000, 3000, -2000, 2000)
        clip = parse_wav(wav_header(channels=2, data_len=8) + pcm)
        np.testing.assert_allclose(clip.samples, [2000 / 32768.0, 0.0])

    def test_bad_magic_rejected(self):
        with pytest.raises(WavFormatError, match="RIFF"):
            parse_wav(b"JUNK" + bytes(40))

    def test_unsupported_bit_depth_rejected(self):
        blob = wav_header(bits=8, data_len=2) + bytes(2)
        with pytest.raises(WavFormatError, match="bit depth"):
            parse_wav(blob)

    def test_empty_data_chunk_rejected(self):
        with pytest.raises(WavFormatError, match="empty data"):
            parse_wav(wav_header(data_len=0))

    def test_parse_serialize_round_trip_is_exact(self):
        rng = np.random.default_rng(7)
        raw = rng.integers(-32768, 32768, size=500, dtype=np.int16)
        clip = AudioClip(samples=raw / 32768.0, sample_rate_hz=16000)
        again = parse_wav(write_wav(clip))
        np.testing.assert_array_equal(again.samples, clip.samples)
        assert again.sample_rate_hz == clip.sample_rate_hz


class TestResample:
    def test_constant_signal_preserved(self):
        clip = AudioClip(samples=np.full(4800, 0.5), sample_rate_hz=48000)
        out = resample_to_16k(clip)
        assert out.sample_rate_hz == 16000
        assert len(out) == 1600
        np.testing.assert_allclose(out.samples, 0.5)

    def test_identity_at_16k(self):
        clip = AudioClip(samples=np.arange(1, 101) / 200.0, sample_rate_hz=16000)
        out = resample_to_16k(clip)
        assert out is clip

    def test_sine_440hz_against_analytic_target(self):
        # Oracle: generate the 16 kHz sine analytically and compare pointwise.
        t48 = np.arange(48000) / 48000.0
        clip = AudioClip(samples=np.sin(2 * np.pi * 440.0 * t48), sample_rate_hz=48000)
        out = resample_to_16k(clip)
        t16 = np.arange(len(out)) / 16000.0
        target = np.sin(2 * np.pi * 440.0 * t16)
        assert len(out) == 16000
        assert np.max(np.abs(out.samples - target)) < 0.01

    def test_output_length_rounding(self):
        clip = AudioClip(samples=np.ones(1001), sample_rate_hz=44100)
        out = resample_to_16k(clip)
        assert len(out) == round(1001 * 16000 / 44100)

    def test_low_rate_rejected(self):
        clip = AudioClip(samples=np.ones(100), sample_rate_hz=7999)
        with pytest.raises(ValueError, match="insufficient bandwidth"):
            resample_to_16k(clip)

    def test_tone_below_4k_keeps_dominant_bin(self):
        # Resampling must not move the dominant frequency of a pure tone.
        from capt.mfcc import power_spectrum

        for freq in (300.0, 1000.0, 3500.0):
            t48 = np.arange(24000) / 48000.0
            clip = AudioClip(samples=np.sin(2 * np.pi * freq * t48),
                             sample_rate_hz=48000)
            out = resample_to_16k(clip)
            spec = power_spectrum(out.samples[:512], 512)
            peak_hz = np.argmax(spec) * 16000 / 512
            assert abs(peak_hz - freq) <= 16000 / 512


class TestPadClips:
    def test_pads_to_max_with_zero_tail(self):
        a = AudioClip(samples=np.ones(300), sample_rate_hz=16000)
        b = AudioClip(samples=np.ones(500), sample_rate_hz=16000)
        out = pad_clips([a, b])
        assert [len(c) for c in out] == [500, 500]
        assert np.all(out[0].samples[300:] == 0.0)
        np.testing.assert_array_equal(out[0].samples[:300], a.samples)

    def test_single_clip_unchanged(self):
        a = AudioClip(samples=np.ones(123), sample_rate_hz=16000)
        out = pad_clips([a])
        assert out[0] is a

    def test_target_shorter_than_longest_rejected(self):
        clips = [AudioClip(samples=np.ones(n), sample_rate_hz=16000) for n in (100, 200)]
        with pytest.raises(ValueError, match="truncation"):
            pad_clips(clips, target_len=50)

    def test_padding_preserves_energy_random_lengths(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            clips = [
                AudioClip(samples=rng.uniform(-1, 1, size=rng.integers(10, 400)),
                          sample_rate_hz=16000)
                for _ in range(rng.integers(1, 6))
            ]
            out = pad_clips(clips)
            lengths = {len(c) for c in out}
            assert len(lengths) == 1
            for padded, orig in zip(out, clips):
                n = len(orig)
                np.testing.assert_array_equal(padded.samples[:n], orig.samples)
                assert np.all(padded.samples[n:] == 0.0)
                # same-order reduction: |sum of abs| unchanged by the zero tail
                assert np.abs(padded.samples[:n]).sum() == np.abs(orig.samples).sum()


class TestManifest:
    def _write(self, tmp_path, body, with_files=True):
        p = tmp_path / "manifest.csv"
        p.write_text(body, encoding="utf-8")
        if with_files:
            for line in body.splitlines()[1:]:
                if line.strip():
                    name = line.split(",")[0]
                    (tmp_path / name).write_bytes(b"")
        return p

    def test_four_rows_parsed(self, tmp_path):
        body = (
            "path,word_id,label,speaker_id\n"
            "a.wav,w1,correct,s1\n"
            "b.wav,w1,correct,s2\n"
            "c.wav,w1,mispronounced,s1\n"
            "d.wav,w2,correct,s3\n"
        )
        m = load_manifest(self._write(tmp_path, body))
        assert len(m.entries) == 4
        labels = [e.label for e in m.entries]
        assert labels.count("correct") == 3
        assert labels.count("mispronounced") == 1
        assert m.word_ids() == ["w1", "w2"]

    def test_empty_file_rejected(self, tmp_path):
        with pytest.raises(ManifestError, match="empty manifest"):
            load_manifest(self._write(tmp_path, "", with_files=False))

    def test_header_only_rejected(self, tmp_path):
        body = "path,word_id,label,speaker_id\n"
        with pytest.raises(ManifestError, match="empty manifest"):
            load_manifest(self._write(tmp_path, body, with_files=False))

    def test_unknown_label_names_row_and_token(self, tmp_path):
        body = (
            "path,word_id,label,speaker_id\n"
            "a.wav,w1,correct,s1\n"
            "b.wav,w1,wrongish,s2\n"
        )
        with pytest.raises(ManifestError, match=r"row 3.*wrongish"):
            load_manifest(self._write(tmp_path, body))

    def test_duplicate_path_rejected(self, tmp_path):
        body = (
            "path,word_id,label,speaker_id\n"
            "a.wav,w1,correct,s1\n"
            "a.wav,w1,correct,s2\n"
        )
        with pytest.raises(ManifestError, match="duplicate path"):
            load_manifest(self._write(tmp_path, body))

    def test_missing_column_names_row(self, tmp_path):
        body = (
            "path,word_id,label,speaker_id\n"
            "a.wav,w1,correct\n"
        )
        with pytest.raises(ManifestError, match="row 2"):
            load_manifest(self._write(tmp_path, body, with_files=False))

    def test_missing_file_names_row(self, tmp_path):
        body = (
            "path,word_id,label,speaker_id\n"
            "nope.wav,w1,correct,s1\n"
        )
        with pytest.raises(ManifestError, match=r"row 2.*not found"):
            load_manifest(self._write(tmp_path, body, with_files=False))


def test_load_clip_resamples(tmp_path):
    t = np.arange(4800) / 48000.0
    clip = AudioClip(samples=np.sin(2 * np.pi * 440 * t), sample_rate_hz=48000)
    p = tmp_path / "x.wav"
    p.write_bytes(write_wav(clip))
    loaded = load_clip(p)
    assert loaded.sample_rate_hz == CANONICAL_RATE
    assert len(loaded) == 1600
