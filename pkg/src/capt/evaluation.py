"""Scoring, confusion metrics, multi-seed aggregation, and report tables.

The positive class is the mispronunciation (Y=1). Report tables mirror the
percent "mean ± std" layout used for the per-word result summaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .mfcc import MfccConfig, extract_mfcc
from .model import ModelParams, VERDICT_MISPRONOUNCED, predict_probability
from .training import LabeledClip
from .audio import pad_clips

METRIC_NAMES = ("precision", "recall", "accuracy", "f1")


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    tn: int
    fp: int
    fn: int

    def __post_init__(self):
        if min(self.tp, self.tn, self.fp, self.fn) < 0:
            raise ValueError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn


@dataclass(frozen=True)
class MetricSet:
    precision: float
    recall: float
    accuracy: float
    f1: float

    def as_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in METRIC_NAMES}


@dataclass(frozen=True)
class SeedAggregate:
    n_runs: int
    mean: MetricSet
    std: MetricSet


def evaluate_model(m: ModelParams, test_set: list[LabeledClip],
                   mfcc_cfg: MfccConfig = MfccConfig(),
                   pad_to: int | None = None) -> ConfusionCounts:
    """Score every clip and tally the four confusion cases.

    pad_to, when given, is the training-time padding length; shorter test
    clips are brought up to it (longer ones keep their own length).
    """
    if not test_set:
        raise ValueError("empty test set")
    tp = tn = fp = fn = 0
    floor = max(mfcc_cfg.frame_len, pad_to or 0)
    for item in test_set:
        clip = pad_clips([item.clip], max(len(item.clip), floor))[0]
        _, verdict = predict_probability(extract_mfcc(clip, mfcc_cfg), m)
        predicted_positive = verdict == VERDICT_MISPRONOUNCED
        if predicted_positive and item.label == 1:
            tp += 1
        elif predicted_positive and item.label == 0:
            fp += 1
        elif not predicted_positive and item.label == 1:
            fn += 1
        else:
            tn += 1
    return ConfusionCounts(tp=tp, tn=tn, fp=fp, fn=fn)


def compute_metrics(c: ConfusionCounts) -> MetricSet:
    """Precision, recall, accuracy, F1; zero-denominator cases yield 0."""
    if c.total == 0:
        raise ValueError("empty confusion table")
    precision = c.tp / (c.tp + c.fp) if c.tp + c.fp > 0 else 0.0
    recall = c.tp / (c.tp + c.fn) if c.tp + c.fn > 0 else 0.0
    accuracy = (c.tp + c.tn) / c.total
    f1 = (2 * precision * recall / (precision + recall)
          if precision + recall > 0 else 0.0)
    return MetricSet(precision=precision, recall=recall, accuracy=accuracy, f1=f1)


def aggregate_seeds(runs: list[MetricSet]) -> SeedAggregate:
    """Arithmetic mean and sample (n-1) standard deviation per metric."""
    if len(runs) < 2:
        raise ValueError("need at least 2 runs to aggregate")
    n = len(runs)
    means = {}
    stds = {}
    for name in METRIC_NAMES:
        values = [getattr(r, name) for r in runs]
        mean = sum(values) / n
        var = sum((v - mean) ** 2 for v in values) / (n - 1)
        means[name] = mean
        stds[name] = math.sqrt(var)
    return SeedAggregate(n_runs=n, mean=MetricSet(**means), std=MetricSet(**stds))


@dataclass(frozen=True)
class ReportRow:
    word_id: str
    gloss: str
    variant: str
    aggregate: SeedAggregate


REPORT_CSV_HEADER = ("word_id,word_gloss,variant,f1_mean,f1_std,acc_mean,acc_std,"
                     "prec_mean,prec_std,rec_mean,rec_std")


def format_cell(mean: float, std: float) -> str:
    """Percent formatting: 0.855 ± 0.033 -> '85.5 ± 3.3'."""
    return f"{mean * 100:.1f} ± {std * 100:.1f}"


def render_report(rows: list[ReportRow]) -> tuple[str, str]:
    """Render (csv_text, table_text) for per-word aggregates.

    The CSV keeps fractions; the text report shows two percent tables, one
    for F1/accuracy and one for precision/recall, with variants side by
    side. Pure function: identical input gives identical bytes.
    """
    if not rows:
        raise ValueError("no aggregates to report")

    csv_lines = [REPORT_CSV_HEADER]
    for r in rows:
        m, s = r.aggregate.mean, r.aggregate.std
        csv_lines.append(
            f"{r.word_id},{r.gloss},{r.variant},"
            f"{m.f1:.6f},{s.f1:.6f},{m.accuracy:.6f},{s.accuracy:.6f},"
            f"{m.precision:.6f},{s.precision:.6f},{m.recall:.6f},{s.recall:.6f}"
        )
    csv_text = "\n".join(csv_lines) + "\n"

    words: list[tuple[str, str]] = []
    variants: list[str] = []
    by_key: dict[tuple[str, str], ReportRow] = {}
    for r in rows:
        if (r.word_id, r.gloss) not in words:
            words.append((r.word_id, r.gloss))
        if r.variant not in variants:
            variants.append(r.variant)
        by_key[(r.word_id, r.variant)] = r

    def table(title: str, metric_a: str, metric_b: str) -> list[str]:
        header = ["word", "gloss"]
        for metric in (metric_a, metric_b):
            header += [f"{metric} {v}" for v in variants]
        grid = [header]
        for word_id, gloss in words:
            line = [word_id, gloss]
            for metric in (metric_a, metric_b):
                for v in variants:
                    row = by_key.get((word_id, v))
                    if row is None:
                        line.append("-")
                    else:
                        line.append(format_cell(getattr(row.aggregate.mean, metric),
                                                getattr(row.aggregate.std, metric)))
            grid.append(line)
        widths = [max(len(row[i]) for row in grid) for i in range(len(header))]
        out = [title]
        for k, row in enumerate(grid):
            out.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
            if k == 0:
                out.append("  ".join("-" * w for w in widths))
        return out

    lines = table("F1 (%) and accuracy (%), mean ± std over seeds", "f1", "accuracy")
    lines.append("")
    lines += table("Precision (%) and recall (%), mean ± std over seeds",
                   "precision", "recall")
    return csv_text, "\n".join(lines) + "\n"
