"""Command-line entry points: featurize, train, experiment, predict, serve."""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .audio import load_clip, load_manifest
from .experiment import run_experiment
from .mfcc import MfccConfig, extract_mfcc
from .model import VARIANTS, deserialize_model, serialize_model
from .service import model_version_of, score_wav_bytes, serve
from .training import (
    TrainConfig,
    assemble_training_set,
    load_examples,
    split_per_word,
    train_word_model,
)


def parse_config_overrides(pairs: list[str]):
    """Split `key=value` overrides into MfccConfig / TrainConfig updates."""
    mfcc_fields = {f.name: f.type for f in dataclasses.fields(MfccConfig)}
    train_fields = {f.name: f.type for f in dataclasses.fields(TrainConfig)}
    mfcc_kw: dict = {}
    train_kw: dict = {}
    for pair in pairs:
        key, sep, raw = pair.partition("=")
        if not sep:
            raise ValueError(f"bad --config entry {pair!r}, expected key=value")
        value: object
        if raw.lower() in ("true", "false"):
            value = raw.lower() == "true"
        else:
            try:
                value = int(raw)
            except ValueError:
                try:
                    value = float(raw)
                except ValueError:
                    value = raw
        if key in mfcc_fields:
            mfcc_kw[key] = value
        elif key in train_fields:
            train_kw[key] = value
        else:
            raise ValueError(f"unknown config key {key!r}")
    return MfccConfig(**mfcc_kw), TrainConfig(**train_kw)


def cmd_featurize(args) -> int:
    mfcc_cfg, _ = parse_config_overrides(args.config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    paths: list[str] = list(args.wavs)
    if args.manifest:
        manifest = load_manifest(args.manifest)
        paths += [e.path for e in manifest.entries]
    if not paths:
        print("nothing to featurize: give --manifest or WAV paths", file=sys.stderr)
        return 2
    for p in paths:
        feats = extract_mfcc(load_clip(p), mfcc_cfg)
        target = out / (Path(p).stem + ".csv")
        with target.open("w", encoding="utf-8") as fh:
            for frame in feats:
                fh.write(",".join(f"{x:.12g}" for x in frame) + "\n")
        print(f"{p} -> {target} ({feats.shape[0]}x{feats.shape[1]})")
    return 0


def cmd_train(args) -> int:
    mfcc_cfg, train_cfg = parse_config_overrides(args.config)
    train_cfg = dataclasses.replace(train_cfg, seed=args.seed, variant=args.variant)
    manifest = load_manifest(args.manifest)
    split = split_per_word(manifest, args.word, args.seed)
    train_set = assemble_training_set(split, manifest, args.seed)
    examples = load_examples(train_set)
    model, log = train_word_model(examples, train_cfg, mfcc_cfg, word_id=args.word)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_bytes(serialize_model(model))
    log_path = out.with_suffix(".log.csv")
    log_path.write_text(log.to_text(), encoding="utf-8")
    print(f"trained {args.word} ({args.variant}, seed {args.seed}) "
          f"in {len(log.epoch_losses)} epochs -> {out}")
    return 0


def _parse_glosses(path: str | None) -> dict[str, str]:
    if not path:
        return {}
    glosses = {}
    for line in Path(path).read_text(encoding="utf-8").strip().splitlines()[1:]:
        word_id, _, gloss = line.partition(",")
        glosses[word_id.strip()] = gloss.strip()
    return glosses


def cmd_experiment(args) -> int:
    mfcc_cfg, train_cfg = parse_config_overrides(args.config)
    manifest = load_manifest(args.manifest)
    variants = args.variants.split(",")
    for v in variants:
        if v not in VARIANTS:
            print(f"unknown variant {v!r}", file=sys.stderr)
            return 2
    seeds = [int(s) for s in args.seeds.split(",")]
    rows = run_experiment(manifest, args.out, variants, seeds,
                          base_cfg=train_cfg, mfcc_cfg=mfcc_cfg,
                          glosses=_parse_glosses(args.glosses))
    print(f"{len(rows)} word x variant aggregates -> {args.out}/report.csv")
    return 0


def cmd_predict(args) -> int:
    blob = Path(args.model).read_bytes()
    model = deserialize_model(blob)
    response = score_wav_bytes(model, Path(args.wav).read_bytes(),
                               model_version=model_version_of(blob))
    print(json.dumps(response))
    return 0


def cmd_serve(args) -> int:
    server = serve(args.registry, args.bind)
    host, port = server.server_address[:2]
    print(f"serving {len(server.registry)} word models on http://{host}:{port}",
          flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="capt",
        description="Per-word mispronunciation detection: features, training, "
                    "experiments, and a scoring service.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("featurize", help="dump MFCC matrices as CSV, one file per clip")
    p.add_argument("wavs", nargs="*", help="WAV files")
    p.add_argument("--manifest", help="manifest whose clips to featurize")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--config", action="append", default=[], metavar="KEY=VALUE")
    p.set_defaults(func=cmd_featurize)

    p = sub.add_parser("train", help="train one word's detector")
    p.add_argument("--manifest", required=True)
    p.add_argument("--word", required=True)
    p.add_argument("--out", required=True, help="model file to write")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--variant", choices=VARIANTS, default="attention_bilstm")
    p.add_argument("--config", action="append", default=[], metavar="KEY=VALUE")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("experiment", help="full protocol over every word in a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--variants", default="bilstm,attention_bilstm")
    p.add_argument("--seeds", default="0,1,2,3,4")
    p.add_argument("--glosses", help="optional CSV word_id,gloss")
    p.add_argument("--config", action="append", default=[], metavar="KEY=VALUE")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("predict", help="score one WAV against one model")
    p.add_argument("--model", required=True)
    p.add_argument("--wav", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("serve", help="HTTP scoring service over a model registry")
    p.add_argument("--registry", required=True)
    p.add_argument("--bind", default="127.0.0.1:8000")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
