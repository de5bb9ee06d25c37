import numpy as np
import pytest

from capt.audio import DatasetManifest, ManifestEntry
from capt.mfcc import MfccConfig
from capt.training import (
    EarlyStopper,
    LabeledClip,
    TrainConfig,
    assemble_training_set,
    compute_class_weights,
    split_per_word,
    train_word_model,
)
from conftest import make_tone


def entry(path, word, label, speaker="s1"):
    return ManifestEntry(path=path, word_id=word, label=label, speaker_id=speaker)


def synthetic_manifest(spec):
    """spec: {word_id: (n_correct, n_mispronounced)}."""
    entries = []
    for word, (n_cor, n_mis) in spec.items():
        for k in range(n_cor):
            entries.append(entry(f"{word}_c{k}.wav", word, "correct"))
        for k in range(n_mis):
            entries.append(entry(f"{word}_m{k}.wav", word, "mispronounced"))
    return DatasetManifest(entries=entries)


class TestSplitPerWord:
    def test_ten_correct_four_mispronounced(self):
        m = synthetic_manifest({"w1": (10, 4)})
        s = split_per_word(m, "w1", seed=0)
        assert (len(s.train_neg), len(s.test_neg)) == (5, 5)
        assert (len(s.train_pos), len(s.test_pos)) == (2, 2)

    def test_odd_counts_round_up_to_train(self):
        m = synthetic_manifest({"w1": (7, 3)})
        s = split_per_word(m, "w1", seed=1)
        assert (len(s.train_neg), len(s.test_neg)) == (4, 3)
        assert (len(s.train_pos), len(s.test_pos)) == (2, 1)

    def test_same_seed_same_split(self):
        m = synthetic_manifest({"w1": (9, 5)})
        a = split_per_word(m, "w1", seed=7)
        b = split_per_word(m, "w1", seed=7)
        assert a == b

    def test_different_seeds_differ(self):
        m = synthetic_manifest({"w1": (20, 10)})
        a = split_per_word(m, "w1", seed=0)
        b = split_per_word(m, "w1", seed=1)
        assert a != b

    def test_single_mispronounced_rejected(self):
        m = synthetic_manifest({"w1": (5, 1)})
        with pytest.raises(ValueError, match="class too small: mispronounced"):
            split_per_word(m, "w1", seed=0)

    def test_single_correct_rejected(self):
        m = synthetic_manifest({"w1": (1, 5)})
        with pytest.raises(ValueError, match="class too small: correct"):
            split_per_word(m, "w1", seed=0)

    def test_partition_and_disjointness_randomized(self):
        rng = np.random.default_rng(5)
        for trial in range(100):
            n_cor = int(rng.integers(2, 15))
            n_mis = int(rng.integers(2, 15))
            m = synthetic_manifest({"w1": (n_cor, n_mis)})
            s = split_per_word(m, "w1", seed=trial)
            train = {e.path for e in s.train_pos + s.train_neg}
            test = {e.path for e in s.test_pos + s.test_neg}
            assert train | test == {e.path for e in m.entries}
            assert not train & test
            for e in s.test_pos + s.test_neg + s.train_pos + s.train_neg:
                assert e.word_id == "w1"


class TestAssembleTrainingSet:
    def test_other_word_correct_audio_becomes_positive(self):
        m = synthetic_manifest({"w1": (10, 4), "w2": (6, 2), "w3": (8, 2)})
        split = split_per_word(m, "w1", seed=0)
        items = assemble_training_set(split, m, seed=0)
        own = [x for x in items if x.source_word_id == "w1"]
        borrowed = [x for x in items if x.source_word_id != "w1"]
        assert {x.label for x in borrowed} == {1}
        assert all(x.entry.label == "correct" for x in borrowed)
        assert sorted({x.source_word_id for x in borrowed}) == ["w2", "w3"]
        # target word keeps its own labels
        assert sum(1 for x in own if x.label == 0) == len(split.train_neg)
        assert sum(1 for x in own if x.label == 1) == len(split.train_pos)

    def test_augmentation_uses_exactly_other_words_training_half(self):
        m = synthetic_manifest({"w1": (4, 2), "w2": (6, 3)})
        split = split_per_word(m, "w1", seed=3)
        items = assemble_training_set(split, m, seed=3)
        borrowed = {x.entry.path for x in items if x.source_word_id == "w2"}
        w2_split = split_per_word(m, "w2", seed=3)
        assert borrowed == {e.path for e in w2_split.train_neg}

    def test_single_word_manifest_adds_nothing(self):
        m = synthetic_manifest({"w1": (6, 4)})
        split = split_per_word(m, "w1", seed=0)
        items = assemble_training_set(split, m, seed=0)
        assert len(items) == len(split.train_pos) + len(split.train_neg)

    def test_positives_outnumber_negatives_at_scale(self):
        # many words, few mispronunciations each: augmented Y=1 dominates
        m = synthetic_manifest({f"w{k}": (10, 4) for k in range(17)})
        split = split_per_word(m, "w0", seed=0)
        items = assemble_training_set(split, m, seed=0)
        n_pos = sum(1 for x in items if x.label == 1)
        n_neg = sum(1 for x in items if x.label == 0)
        assert n_pos > n_neg

    def test_test_sets_untouched(self):
        m = synthetic_manifest({"w1": (6, 4), "w2": (6, 4)})
        split = split_per_word(m, "w1", seed=2)
        test_before = (list(split.test_pos), list(split.test_neg))
        assemble_training_set(split, m, seed=2)
        assert (split.test_pos, split.test_neg) == test_before
        for e in split.test_pos + split.test_neg:
            assert e.word_id == "w1"


class TestClassWeights:
    def test_corpus_scale_counts(self):
        w = compute_class_weights(n_pos=890, n_neg=2961)
        assert w.w_pos == pytest.approx(3851 / 1780, abs=1e-12)
        assert w.w_neg == pytest.approx(3851 / 5922, abs=1e-12)
        assert w.w_pos == pytest.approx(2.1635, abs=1e-4)
        assert w.w_neg == pytest.approx(0.6503, abs=1e-4)

    def test_balanced_counts_give_unit_weights(self):
        w = compute_class_weights(12, 12)
        assert (w.w_pos, w.w_neg) == (1.0, 1.0)

    def test_weighted_count_identity(self):
        rng = np.random.default_rng(8)
        for _ in range(50):
            n_pos = int(rng.integers(1, 5000))
            n_neg = int(rng.integers(1, 5000))
            w = compute_class_weights(n_pos, n_neg)
            assert n_pos * w.w_pos == pytest.approx(n_neg * w.w_neg, abs=1e-12)
            assert n_pos * w.w_pos == pytest.approx((n_pos + n_neg) / 2, abs=1e-12)

    def test_zero_count_rejected(self):
        with pytest.raises(ValueError):
            compute_class_weights(0, 5)


class TestEarlyStopper:
    def test_scripted_sequence_stops_exactly_on_schedule(self):
        stopper = EarlyStopper(min_delta=0.05, patience=2)
        decisions = [stopper.update(x) for x in [1.0, 0.9, 0.87, 0.86]]
        assert decisions == [False, False, False, True]

    def test_improvement_equal_to_min_delta_counts(self):
        stopper = EarlyStopper(min_delta=0.25, patience=1)
        assert stopper.update(1.0) is False
        assert stopper.update(0.75) is False  # exactly min_delta
        assert stopper.update(0.625) is True

    def test_never_stops_while_improving(self):
        stopper = EarlyStopper(min_delta=1e-4, patience=3)
        for k in range(50):
            assert stopper.update(1.0 - 0.01 * k) is False

    def test_plateau_after_spike_uses_best_loss(self):
        stopper = EarlyStopper(min_delta=0.05, patience=3)
        assert stopper.update(0.5) is False
        assert stopper.update(0.9) is False   # worse: stale 1
        assert stopper.update(0.48) is False  # within min_delta of best: stale 2
        assert stopper.update(0.47) is True   # stale 3


def tone_examples(n_per_class=6, seconds=0.3, seed=0):
    rng = np.random.default_rng(seed)
    out = []
    for label, freq in ((0, 440.0), (1, 880.0)):
        for _ in range(n_per_class):
            clip = make_tone(freq, seconds=seconds, noise_std=0.02,
                             phase=2 * np.pi * rng.random(), rng=rng)
            out.append(LabeledClip(clip=clip, label=label))
    return out


FAST_CFG = TrainConfig(hidden_dim=6, batch_size=4, max_epochs=3, seed=0,
                       variant="attention_bilstm", attention_dim=6)


class TestTrainWordModel:
    def test_bit_identical_reruns(self):
        examples = tone_examples()
        m1, log1 = train_word_model(examples, FAST_CFG, MfccConfig(), word_id="w1")
        m2, log2 = train_word_model(examples, FAST_CFG, MfccConfig(), word_id="w1")
        assert log1.epoch_losses == log2.epoch_losses
        for (n1, a), (n2, b) in zip(m1.tensor_items(), m2.tensor_items()):
            assert n1 == n2
            np.testing.assert_array_equal(a, b)

    def test_loss_decreases_on_separable_tones(self):
        cfg = TrainConfig(hidden_dim=8, batch_size=8, max_epochs=10, seed=1,
                          variant="attention_bilstm")
        _, log = train_word_model(tone_examples(n_per_class=8), cfg)
        assert log.epoch_losses[-1] < log.epoch_losses[0]

    def test_single_class_rejected(self):
        examples = [x for x in tone_examples() if x.label == 1]
        with pytest.raises(ValueError, match="single-class"):
            train_word_model(examples, FAST_CFG)

    def test_wrong_rate_rejected(self):
        bad = tone_examples(n_per_class=2)
        bad[0].clip.sample_rate_hz = 8000
        with pytest.raises(ValueError, match="16 kHz"):
            train_word_model(bad, FAST_CFG)

    def test_log_text_format(self):
        _, log = train_word_model(tone_examples(n_per_class=2), FAST_CFG)
        lines = log.to_text().strip().splitlines()
        assert lines[0] == "epoch,mean_loss"
        for i, line in enumerate(lines[1:], start=1):
            epoch, loss = line.split(",")
            assert int(epoch) == i
            # at least 10 significant digits survive the round trip
            assert float(loss) == pytest.approx(log.epoch_losses[i - 1], rel=1e-10)

    def test_model_meta_records_configuration(self):
        mfcc_cfg = MfccConfig()
        model, _ = train_word_model(tone_examples(n_per_class=2), FAST_CFG,
                                    mfcc_cfg, word_id="hello")
        assert model.meta["word_id"] == "hello"
        assert model.meta["mfcc"] == mfcc_cfg.to_dict()
        assert model.feature_fingerprint == mfcc_cfg.fingerprint()
        assert model.meta["train"]["variant"] == "attention_bilstm"

    def test_short_clips_padded_to_window(self):
        rng = np.random.default_rng(3)
        examples = [
            LabeledClip(clip=make_tone(440, seconds=0.01, rng=rng), label=0),
            LabeledClip(clip=make_tone(880, seconds=0.01, rng=rng), label=1),
        ]
        model, log = train_word_model(examples, FAST_CFG)
        assert len(log.epoch_losses) > 0
