"""Model registry and the HTTP scoring service.

Registry layout: a directory holding `<word_id>.model` files plus a
`registry.csv` (`word_id,gloss` header) naming the deployable words.

Endpoints:
    GET  /v1/health          -> {"status": "ok"}
    GET  /v1/words           -> [{word_id, gloss, model_version}, ...]
    POST /v1/score?word_id=X -> ScoreResponse (body: raw WAV or multipart)

Scoring here and in the CLI goes through the same score_wav_bytes, so the
two surfaces cannot drift apart.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from .audio import WavFormatError, parse_wav, resample_to_16k
from .mfcc import MfccConfig, extract_mfcc
from .model import ModelParams, deserialize_model, predict_probability


def model_version_of(data: bytes) -> str:
    """Provenance tag for responses: digest prefix of the model file."""
    return hashlib.sha256(data).hexdigest()[:12]


@dataclass
class RegistryEntry:
    word_id: str
    gloss: str
    path: str
    model: ModelParams
    model_version: str


class ModelRegistry:
    """Immutable map word_id -> deployable model, loaded once at startup."""

    def __init__(self, entries: dict[str, RegistryEntry]):
        if not entries:
            raise ValueError("empty registry")
        self._entries = entries

    @classmethod
    def load(cls, root: str | Path) -> "ModelRegistry":
        root = Path(root)
        index = root / "registry.csv"
        if not index.exists():
            raise ValueError(f"no registry.csv under {root}")
        entries: dict[str, RegistryEntry] = {}
        lines = index.read_text(encoding="utf-8").strip().splitlines()
        if not lines or lines[0].strip() != "word_id,gloss":
            raise ValueError("registry.csv must start with header `word_id,gloss`")
        for line in lines[1:]:
            if not line.strip():
                continue
            word_id, _, gloss = line.partition(",")
            word_id = word_id.strip()
            if word_id in entries:
                raise ValueError(f"duplicate registry word {word_id!r}")
            model_path = root / f"{word_id}.model"
            if not model_path.exists():
                raise ValueError(f"missing model file for word {word_id!r}")
            blob = model_path.read_bytes()
            entries[word_id] = RegistryEntry(
                word_id=word_id,
                gloss=gloss.strip() or word_id,
                path=str(model_path),
                model=deserialize_model(blob),  # validates the file
                model_version=model_version_of(blob),
            )
        return cls(entries)

    def get(self, word_id: str) -> RegistryEntry | None:
        return self._entries.get(word_id)

    def words(self) -> list[RegistryEntry]:
        return [self._entries[k] for k in sorted(self._entries)]

    def __len__(self) -> int:
        return len(self._entries)


def mfcc_config_of(model: ModelParams) -> MfccConfig:
    """Feature config the model was trained with, verified by fingerprint.

    Refuses to score when the stored config no longer matches the model's
    fingerprint: silently drifted features would produce garbage verdicts.
    """
    cfg_dict = model.meta.get("mfcc")
    cfg = MfccConfig.from_dict(cfg_dict) if cfg_dict else MfccConfig()
    if model.feature_fingerprint and cfg.fingerprint() != model.feature_fingerprint:
        raise ValueError(
            "feature fingerprint mismatch between model and MFCC configuration"
        )
    return cfg


def score_wav_bytes(model: ModelParams, wav_bytes: bytes,
                    model_version: str = "") -> dict:
    """Parse, normalize, featurize, and score one WAV payload."""
    clip = resample_to_16k(parse_wav(wav_bytes))
    cfg = mfcc_config_of(model)
    if len(clip) < cfg.frame_len:
        raise WavFormatError(
            f"clip too short: {len(clip)} samples < one {cfg.frame_len}-sample window"
        )
    p, verdict = predict_probability(extract_mfcc(clip, cfg), model)
    return {
        "word_id": model.meta.get("word_id", ""),
        "probability": p,
        "verdict": verdict,
        "model_version": model_version,
    }


def extract_wav_from_multipart(body: bytes, content_type: str) -> bytes:
    """Pull the first file part out of a multipart/form-data body."""
    boundary = None
    for piece in content_type.split(";"):
        piece = piece.strip()
        if piece.startswith("boundary="):
            boundary = piece[len("boundary="):].strip('"')
    if not boundary:
        raise ValueError("multipart body without boundary")
    delim = b"--" + boundary.encode("utf-8")
    for part in body.split(delim):
        if not part or part in (b"--", b"--\r\n") or part == b"\r\n":
            continue
        header_blob, _, payload = part.partition(b"\r\n\r\n")
        if not payload:
            continue
        headers = header_blob.decode("utf-8", errors="replace").lower()
        if "content-disposition" in headers:
            if payload.endswith(b"\r\n"):
                payload = payload[:-2]
            return payload
    raise ValueError("no file part in multipart body")


class _ScoreHandler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"

    def _send_json(self, status: int, payload) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, fmt, *args):  # noqa: A003 - silence default stderr noise
        pass

    def do_GET(self):
        url = urlparse(self.path)
        if url.path == "/v1/health":
            self._send_json(200, {"status": "ok"})
        elif url.path == "/v1/words":
            registry: ModelRegistry = self.server.registry
            self._send_json(200, [
                {"word_id": e.word_id, "gloss": e.gloss,
                 "model_version": e.model_version}
                for e in registry.words()
            ])
        else:
            self._send_json(404, {"error": "not found"})

    def do_POST(self):
        url = urlparse(self.path)
        if url.path != "/v1/score":
            self._send_json(404, {"error": "not found"})
            return
        registry: ModelRegistry = self.server.registry
        params = parse_qs(url.query)
        word_id = (params.get("word_id") or [""])[0]
        entry = registry.get(word_id)
        if entry is None:
            self._send_json(404, {"error": "unknown word"})
            return
        length = int(self.headers.get("Content-Length") or 0)
        body = self.rfile.read(length)
        content_type = self.headers.get("Content-Type", "")
        try:
            if content_type.startswith("multipart/form-data"):
                body = extract_wav_from_multipart(body, content_type)
            response = score_wav_bytes(entry.model, body, entry.model_version)
            response["word_id"] = entry.word_id
        except (WavFormatError, ValueError) as exc:
            self._send_json(400, {"error": str(exc)})
            return
        self._send_json(200, response)


class ScoringServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, address, registry: ModelRegistry):
        super().__init__(address, _ScoreHandler)
        self.registry = registry


def serve(registry_root: str | Path, bind: str = "127.0.0.1:8000") -> ScoringServer:
    """Load the registry and bind the server; caller runs serve_forever()."""
    registry = ModelRegistry.load(registry_root)
    host, _, port = bind.partition(":")
    return ScoringServer((host or "127.0.0.1", int(port or 8000)), registry)
