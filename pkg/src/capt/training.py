"""Per-word training protocol: splits, augmentation, class weights, loop.

All randomness (split shuffles, parameter init, batch order) flows from
explicit integer seeds, so every experiment is reproducible bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .audio import (
    CANONICAL_RATE,
    AudioClip,
    DatasetManifest,
    LABEL_CORRECT,
    LABEL_MISPRONOUNCED,
    ManifestEntry,
    load_clip,
    pad_clips,
)
from .mfcc import MfccConfig, extract_mfcc
from .model import (
    AdamConfig,
    AdamState,
    ModelParams,
    VARIANT_ATTENTION,
    VARIANTS,
    adam_step,
    backward_pass,
    clip_gradients_global_norm,
    init_model,
)


@dataclass(frozen=True)
class TrainConfig:
    hidden_dim: int = 128
    batch_size: int = 64
    learning_rate: float = 1e-3
    max_epochs: int = 100
    patience: int = 5
    min_delta: float = 1e-4
    clip_norm: float = 5.0
    seed: int = 0
    variant: str = VARIANT_ATTENTION
    attention_dim: int | None = None  # defaults to 2 * hidden_dim
    class_weighting: bool = True

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        for name in ("hidden_dim", "batch_size", "learning_rate", "max_epochs",
                     "patience", "min_delta", "clip_norm"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        return d


@dataclass
class WordSplit:
    """Train/test halves of one word; pos = mispronounced (Y=1)."""

    word_id: str
    train_pos: list[ManifestEntry]
    train_neg: list[ManifestEntry]
    test_pos: list[ManifestEntry]
    test_neg: list[ManifestEntry]


@dataclass(frozen=True)
class ClassWeights:
    w_pos: float
    w_neg: float


@dataclass(frozen=True)
class TrainingExample:
    """One labeled training item, tagged with the word it came from."""

    entry: ManifestEntry
    label: int  # 1 = mispronounced class
    source_word_id: str


@dataclass
class LabeledClip:
    clip: AudioClip
    label: int
    source_word_id: str = ""


@dataclass
class TrainingLog:
    epoch_losses: list[float] = field(default_factory=list)
    stopped_early: bool = False

    def to_text(self) -> str:
        """One `epoch,mean_loss` line per epoch, 12 significant digits."""
        lines = ["epoch,mean_loss"]
        lines += [f"{i},{loss:.12g}" for i, loss in enumerate(self.epoch_losses, start=1)]
        return "\n".join(lines) + "\n"


def _half_split_indices(n_pos: int, n_neg: int, seed: int):
    """Seeded per-class shuffles; first ceil(n/2) of each goes to train.

    Shared by split_per_word and the augmentation picker so that the
    "training half" of any word is the same in both places.
    """
    rng = np.random.default_rng(seed)
    pos_perm = rng.permutation(n_pos)
    neg_perm = rng.permutation(n_neg)
    pos_cut = math.ceil(n_pos / 2)
    neg_cut = math.ceil(n_neg / 2)
    return (pos_perm[:pos_cut], pos_perm[pos_cut:],
            neg_perm[:neg_cut], neg_perm[neg_cut:])


def split_per_word(manifest: DatasetManifest, word_id: str, seed: int) -> WordSplit:
    """50/50 stratified split of one word's entries, deterministic per seed."""
    entries = manifest.entries_for_word(word_id)
    pos = [e for e in entries if e.label == LABEL_MISPRONOUNCED]
    neg = [e for e in entries if e.label == LABEL_CORRECT]
    if len(pos) < 2:
        raise ValueError(f"class too small: {LABEL_MISPRONOUNCED} "
                         f"({len(pos)} examples of word {word_id!r})")
    if len(neg) < 2:
        raise ValueError(f"class too small: {LABEL_CORRECT} "
                         f"({len(neg)} examples of word {word_id!r})")
    tr_p, te_p, tr_n, te_n = _half_split_indices(len(pos), len(neg), seed)
    return WordSplit(
        word_id=word_id,
        train_pos=[pos[i] for i in tr_p],
        test_pos=[pos[i] for i in te_p],
        train_neg=[neg[i] for i in tr_n],
        test_neg=[neg[i] for i in te_n],
    )


def assemble_training_set(split: WordSplit, manifest: DatasetManifest,
                          seed: int) -> list[TrainingExample]:
    """Target word's training halves plus other words' correct audio as Y=1.

    Other-word correct pronunciations diversify the mispronunciation class;
    only their training halves are taken, so simultaneous experiments never
    touch each other's test data. Test sets are not modified.
    """
    items = [TrainingExample(e, 1, split.word_id) for e in split.train_pos]
    items += [TrainingExample(e, 0, split.word_id) for e in split.train_neg]
    for other in manifest.word_ids():
        if other == split.word_id:
            continue
        entries = manifest.entries_for_word(other)
        pos = [e for e in entries if e.label == LABEL_MISPRONOUNCED]
        neg = [e for e in entries if e.label == LABEL_CORRECT]
        tr_n = _half_split_indices(len(pos), len(neg), seed)[2]
        items += [TrainingExample(neg[i], 1, other) for i in tr_n]
    return items


def compute_class_weights(n_pos: int, n_neg: int) -> ClassWeights:
    """Balanced inverse-frequency weights: w_c = N / (2 * n_c).

    The smaller class gets the larger weight; n_pos*w_pos = n_neg*w_neg = N/2.
    """
    if n_pos < 1 or n_neg < 1:
        raise ValueError("both classes need at least one example")
    total = n_pos + n_neg
    return ClassWeights(w_pos=total / (2.0 * n_pos), w_neg=total / (2.0 * n_neg))


class EarlyStopper:
    """Stop after `patience` consecutive epochs improving by < min_delta."""

    def __init__(self, min_delta: float, patience: int):
        self.min_delta = min_delta
        self.patience = patience
        self.best = math.inf
        self.stale = 0

    def update(self, loss: float) -> bool:
        """Record one epoch loss; True means stop now."""
        if self.best - loss >= self.min_delta:
            self.best = loss
            self.stale = 0
        else:
            self.best = min(self.best, loss)
            self.stale += 1
        return self.stale >= self.patience


def load_examples(train_set: list[TrainingExample]) -> list[LabeledClip]:
    """Read and normalize the audio behind each training example."""
    return [
        LabeledClip(clip=load_clip(ex.entry.path), label=ex.label,
                    source_word_id=ex.source_word_id)
        for ex in train_set
    ]


def train_word_model(examples: list[LabeledClip], cfg: TrainConfig,
                     mfcc_cfg: MfccConfig = MfccConfig(),
                     word_id: str = "") -> tuple[ModelParams, TrainingLog]:
    """Train one word's detector on in-memory labeled clips.

    Waveforms are padded to the set's maximum length and featurized once.
    Each epoch shuffles, walks mini-batches, backpropagates the weighted
    loss, clips the global gradient norm, and takes one Adam step per batch.
    """
    if not examples:
        raise ValueError("empty training set")
    labels = np.array([ex.label for ex in examples])
    n_pos = int((labels == 1).sum())
    n_neg = int((labels == 0).sum())
    if n_pos == 0 or n_neg == 0:
        raise ValueError("single-class training set")
    for ex in examples:
        if ex.clip.sample_rate_hz != CANONICAL_RATE:
            raise ValueError("training clips must be at 16 kHz")

    if cfg.class_weighting:
        weights_by_class = compute_class_weights(n_pos, n_neg)
        sample_weights = np.where(labels == 1, weights_by_class.w_pos,
                                  weights_by_class.w_neg)
    else:
        sample_weights = np.ones(len(examples))

    target_len = max(max(len(ex.clip) for ex in examples), mfcc_cfg.frame_len)
    padded = pad_clips([ex.clip for ex in examples], target_len)
    features = np.stack([extract_mfcc(c, mfcc_cfg) for c in padded])

    rng = np.random.default_rng(cfg.seed)
    model = init_model(
        input_dim=mfcc_cfg.n_coeffs,
        hidden_dim=cfg.hidden_dim,
        variant=cfg.variant,
        rng=rng,
        attention_dim=cfg.attention_dim,
        feature_fingerprint=mfcc_cfg.fingerprint(),
        meta={"word_id": word_id, "mfcc": mfcc_cfg.to_dict(), "train": cfg.to_dict()},
    )
    params = model.params_dict()
    adam_state = AdamState(params)
    adam_cfg = AdamConfig(learning_rate=cfg.learning_rate)

    log = TrainingLog()
    stopper = EarlyStopper(cfg.min_delta, cfg.patience)
    n = len(examples)
    step = 0
    for _epoch in range(cfg.max_epochs):
        order = rng.permutation(n)
        epoch_loss = 0.0
        for start in range(0, n, cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            batch = [(features[i], int(labels[i]), float(sample_weights[i])) for i in idx]
            loss, grads = backward_pass(batch, model)
            if not math.isfinite(loss):
                raise ValueError(f"non-finite loss at step {step + 1}")
            clip_gradients_global_norm(grads, cfg.clip_norm)
            step += 1
            adam_step(params, grads, adam_state, step, adam_cfg)
            epoch_loss += loss * len(idx)
        mean_loss = epoch_loss / n
        log.epoch_losses.append(mean_loss)
        if stopper.update(mean_loss):
            log.stopped_early = True
            break
    return model, log
