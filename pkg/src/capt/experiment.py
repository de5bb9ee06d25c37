"""End-to-end experiment driver: split, train, evaluate, aggregate, report.

For every word x variant x seed it trains a detector and scores it on the
word's held-out half, then renders the per-word report tables. All
artifacts land under one output directory:

    models/<word>_<variant>_seed<k>.model
    logs/<word>_<variant>_seed<k>.csv
    report.csv, report.txt
    registry/  (one deployable model per word + registry.csv)
"""

from __future__ import annotations

from pathlib import Path

from .audio import AudioClip, DatasetManifest, load_clip
from .evaluation import (
    ReportRow,
    aggregate_seeds,
    compute_metrics,
    evaluate_model,
    render_report,
)
from .mfcc import MfccConfig
from .model import VARIANT_ATTENTION, serialize_model
from .training import (
    LabeledClip,
    TrainConfig,
    assemble_training_set,
    split_per_word,
    train_word_model,
)

from dataclasses import replace


class _ClipCache:
    """Load each audio file once; experiments share clips across words."""

    def __init__(self):
        self._clips: dict[str, AudioClip] = {}

    def get(self, path: str) -> AudioClip:
        clip = self._clips.get(path)
        if clip is None:
            clip = load_clip(path)
            self._clips[path] = clip
        return clip


def run_word_variant(manifest: DatasetManifest, word_id: str, variant: str,
                     seed: int, base_cfg: TrainConfig, mfcc_cfg: MfccConfig,
                     cache: _ClipCache):
    """One training run; returns (model, log, metrics)."""
    split = split_per_word(manifest, word_id, seed)
    train_set = assemble_training_set(split, manifest, seed)
    examples = [
        LabeledClip(clip=cache.get(ex.entry.path), label=ex.label,
                    source_word_id=ex.source_word_id)
        for ex in train_set
    ]
    cfg = replace(base_cfg, seed=seed, variant=variant)
    model, log = train_word_model(examples, cfg, mfcc_cfg, word_id=word_id)

    pad_to = max(max(len(ex.clip) for ex in examples), mfcc_cfg.frame_len)
    test_items = [LabeledClip(clip=cache.get(e.path), label=1, source_word_id=word_id)
                  for e in split.test_pos]
    test_items += [LabeledClip(clip=cache.get(e.path), label=0, source_word_id=word_id)
                   for e in split.test_neg]
    counts = evaluate_model(model, test_items, mfcc_cfg, pad_to=pad_to)
    return model, log, compute_metrics(counts)


def run_experiment(manifest: DatasetManifest, out_dir: str | Path,
                   variants: list[str], seeds: list[int],
                   base_cfg: TrainConfig = TrainConfig(),
                   mfcc_cfg: MfccConfig = MfccConfig(),
                   glosses: dict[str, str] | None = None) -> list[ReportRow]:
    """Run the full protocol over every word in the manifest.

    A failure in one word aborts with that word named; artifacts written
    for earlier words are left in place.
    """
    if not variants or not seeds:
        raise ValueError("need at least one variant and one seed")
    if len(seeds) < 2:
        raise ValueError("need at least 2 seeds to aggregate")

    out = Path(out_dir)
    models_dir = out / "models"
    logs_dir = out / "logs"
    models_dir.mkdir(parents=True, exist_ok=True)
    logs_dir.mkdir(parents=True, exist_ok=True)

    cache = _ClipCache()
    glosses = glosses or {}
    rows: list[ReportRow] = []
    for word_id in manifest.word_ids():
        for variant in variants:
            runs = []
            for seed in seeds:
                try:
                    model, log, metrics = run_word_variant(
                        manifest, word_id, variant, seed, base_cfg, mfcc_cfg, cache)
                except ValueError as exc:
                    raise RuntimeError(f"word {word_id!r} ({variant}, seed {seed}): {exc}") from exc
                stem = f"{word_id}_{variant}_seed{seed}"
                (models_dir / f"{stem}.model").write_bytes(serialize_model(model))
                (logs_dir / f"{stem}.csv").write_text(log.to_text(), encoding="utf-8")
                runs.append(metrics)
            rows.append(ReportRow(word_id=word_id, gloss=glosses.get(word_id, word_id),
                                  variant=variant, aggregate=aggregate_seeds(runs)))

    csv_text, table_text = render_report(rows)
    (out / "report.csv").write_text(csv_text, encoding="utf-8")
    (out / "report.txt").write_text(table_text, encoding="utf-8")
    _write_registry(out, manifest, variants, seeds, glosses)
    return rows


def _write_registry(out: Path, manifest: DatasetManifest, variants: list[str],
                    seeds: list[int], glosses: dict[str, str]) -> None:
    """Deployable registry: one model per word (attention variant preferred)."""
    deploy_variant = VARIANT_ATTENTION if VARIANT_ATTENTION in variants else variants[0]
    registry = out / "registry"
    registry.mkdir(exist_ok=True)
    lines = ["word_id,gloss"]
    for word_id in manifest.word_ids():
        src = out / "models" / f"{word_id}_{deploy_variant}_seed{seeds[0]}.model"
        (registry / f"{word_id}.model").write_bytes(src.read_bytes())
        lines.append(f"{word_id},{glosses.get(word_id, word_id)}")
    (registry / "registry.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
