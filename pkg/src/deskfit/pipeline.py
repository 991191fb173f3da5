"""Two-step model training, inference, and bit-exact model persistence.

Training step 1 builds the contrastive pair set and fine-tunes the encoder;
step 2 encodes the original training texts with the fine-tuned encoder and
fits the logistic-regression head on them. Step 2 never touches encoder
parameters. Inference is head(encode(text)).

The master seed fans out to the internal random streams by XOR with the
distinct constants below (ASCII tag in the high bits, mixing constant low),
so streams stay reproducible and independently overridable: the shuffle
and head streams additionally XOR their sub-config seed fields, letting a
caller move one stream without disturbing the others.

Model file format "SETFIT-DESK/1" (all integers little-endian):

    magic           b"SETFIT-DESK/<version>\\n"
    manifest_len    u32
    manifest        UTF-8 JSON (dims, hash seed, label names, config echo)
    table           vocab_buckets * dim   float32
    weights         n_classes * dim       float32
    bias            n_classes             float32
    crc32           u32 over all preceding bytes
"""

from __future__ import annotations

import json
import struct
import zlib
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .corpus import MASK64, Dataset
from .encoder import EncoderParams, FinetuneConfig, encode, finetune, init_params
from .errors import (
    BadFormat,
    ChecksumMismatch,
    DeskfitError,
    EmptyDataset,
    UnsupportedVersion,
)
from .head import (
    HeadParams,
    HeadTrainConfig,
    head_predict,
    train_head,
    train_head_mixed,
)
from .pairs import PairSet, TrainPair, generate_pairs

FORMAT_VERSION = "SETFIT-DESK/1"
_MAGIC_PREFIX = b"SETFIT-DESK/"

# seed fan-out: "PAIR", "INIT", "SHUF", "HEAD", "HASH" tags over mixing constants
PAIR_SEED_XOR = 0x50414952_9E3779B9
INIT_SEED_XOR = 0x494E4954_7F4A7C15
SHUFFLE_SEED_XOR = 0x53485546_85EBCA87
HEAD_SEED_XOR = 0x48454144_C2B2AE3D
HASH_SEED_XOR = 0x48415348_27D4EB4F


@dataclass(frozen=True)
class EncoderConfig:
    vocab_buckets: int = 65536
    dim: int = 64
    max_len: int = 256


@dataclass(frozen=True)
class FitConfig:
    """Everything fit() needs besides the data; seeds derive from `seed`."""

    r_pairs: int = 20
    pair_mode: str = "strict"
    encoder: EncoderConfig = field(default_factory=EncoderConfig)
    finetune: FinetuneConfig = field(default_factory=FinetuneConfig)
    head: HeadTrainConfig = field(default_factory=HeadTrainConfig)
    seed: int = 0


@dataclass(frozen=True, eq=False)
class Model:
    encoder: EncoderParams
    head: HeadParams
    label_names: tuple[str, ...]
    train_config: FitConfig
    format_version: str = FORMAT_VERSION
    distill_info: dict[str, Any] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "label_names", tuple(self.label_names))
        if self.encoder.dim != self.head.dim:
            raise ValueError("encoder and head disagree on embedding dimension")
        if self.label_names != self.head.label_names:
            raise ValueError("model and head label names differ")


def _salted(seed: int, salt: int) -> int:
    return (seed ^ salt) & MASK64


def _step(name: str):
    """Re-raise package errors annotated with the failing pipeline step."""

    class _Ctx:
        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            if exc is not None and isinstance(exc, DeskfitError):
                raise type(exc)(f"{name}: {exc}") from None
            return False

    return _Ctx()


def _train_model(
    train: Dataset,
    config: FitConfig,
    sim_pairs: tuple[TrainPair, ...] = (),
    soft_rows: tuple[list[str], list[np.ndarray], float] | None = None,
    distill_info: dict[str, Any] | None = None,
) -> Model:
    """Shared trainer behind fit() and distill().

    `sim_pairs` extends the contrastive pair set with continuous-target
    pairs; `soft_rows` = (texts, teacher probability vectors, alpha) adds
    soft-target rows to head training. With neither, this is exactly fit().
    """
    if not train.examples:
        raise EmptyDataset("training dataset has no examples")
    seed = config.seed & MASK64

    with _step("pair generation"):
        labeled = generate_pairs(
            train, config.r_pairs, _salted(seed, PAIR_SEED_XOR), config.pair_mode
        )
    pair_set = PairSet(labeled.pairs + tuple(sim_pairs), labeled.r, labeled.class_count)

    enc0 = init_params(
        vocab_buckets=config.encoder.vocab_buckets,
        dim=config.encoder.dim,
        max_len=config.encoder.max_len,
        hash_seed=_salted(seed, HASH_SEED_XOR),
        init_seed=_salted(seed, INIT_SEED_XOR),
    )
    shuffle_cfg = replace(
        config.finetune, seed=_salted(config.finetune.seed ^ seed, SHUFFLE_SEED_XOR)
    )
    with _step("encoder fine-tuning"):
        enc = finetune(enc0, pair_set, shuffle_cfg)

    with _step("training-text encoding"):
        embeddings = [encode(enc, ex.text) for ex in train.examples]
    head_cfg = replace(config.head, seed=_salted(config.head.seed ^ seed, HEAD_SEED_XOR))
    with _step("head training"):
        if soft_rows is None or not soft_rows[0]:
            head = train_head(
                embeddings, train.labels(), head_cfg, label_names=train.label_names
            )
        else:
            texts, targets, alpha = soft_rows
            soft_embeddings = [encode(enc, t) for t in texts]
            head = train_head_mixed(
                embeddings,
                train.labels(),
                soft_embeddings,
                targets,
                alpha,
                head_cfg,
                label_names=train.label_names,
            )
    return Model(
        encoder=enc,
        head=head,
        label_names=train.label_names,
        train_config=config,
        distill_info=distill_info,
    )


def fit(train: Dataset, config: FitConfig | None = None) -> Model:
    """The two-step training procedure: pair fine-tuning, then head fitting."""
    return _train_model(train, config or FitConfig())


def predict_proba(model: Model, text: str) -> np.ndarray:
    """Class probability vector for a text."""
    _, probs = head_predict(model.head, encode(model.encoder, text))
    return probs


def predict(model: Model, text: str) -> int:
    """Predicted label index for a text (argmax of predict_proba)."""
    label, _ = head_predict(model.head, encode(model.encoder, text))
    return label


def _config_to_dict(config: FitConfig) -> dict[str, Any]:
    return asdict(config)


def _config_from_dict(data: Mapping[str, Any]) -> FitConfig:
    return FitConfig(
        r_pairs=data["r_pairs"],
        pair_mode=data["pair_mode"],
        encoder=EncoderConfig(**data["encoder"]),
        finetune=FinetuneConfig(**data["finetune"]),
        head=HeadTrainConfig(**data["head"]),
        seed=data["seed"],
    )


def save_model(model: Model, path: str | Path) -> None:
    """Write the model in the SETFIT-DESK/1 container; bit-exact round trip."""
    manifest = {
        "vocab_buckets": model.encoder.vocab_buckets,
        "dim": model.encoder.dim,
        "max_len": model.encoder.max_len,
        "hash_seed": model.encoder.hash_seed,
        "n_classes": model.head.n_classes,
        "label_names": list(model.label_names),
        "train_config": _config_to_dict(model.train_config),
    }
    if model.distill_info is not None:
        manifest["distill"] = model.distill_info
    blob = json.dumps(manifest, sort_keys=True, separators=(",", ":")).encode("utf-8")

    out = bytearray()
    out += model.format_version.encode("ascii") + b"\n"
    out += struct.pack("<I", len(blob))
    out += blob
    out += model.encoder.table.astype("<f4").tobytes(order="C")
    out += model.head.weights.astype("<f4").tobytes(order="C")
    out += model.head.bias.astype("<f4").tobytes(order="C")
    out += struct.pack("<I", zlib.crc32(bytes(out)) & 0xFFFFFFFF)
    Path(path).write_bytes(bytes(out))


def _take(buf: bytes, offset: int, size: int, what: str) -> tuple[bytes, int]:
    if offset + size > len(buf):
        raise BadFormat(f"truncated file: {what} needs {size} bytes")
    return buf[offset : offset + size], offset + size


def load_model(path: str | Path) -> Model:
    """Read a model written by save_model, verifying version and checksum."""
    buf = Path(path).read_bytes()
    newline = buf.find(b"\n")
    if newline < 0 or not buf.startswith(_MAGIC_PREFIX):
        raise BadFormat(f"{path}: not a SETFIT-DESK model file")
    version = buf[len(_MAGIC_PREFIX) : newline].decode("ascii", errors="replace")
    if version != "1":
        raise UnsupportedVersion(f"{path}: format SETFIT-DESK/{version}, expected /1")

    stored_crc = struct.unpack("<I", buf[-4:])[0] if len(buf) >= 4 else None
    if stored_crc is None or zlib.crc32(buf[:-4]) & 0xFFFFFFFF != stored_crc:
        raise ChecksumMismatch(f"{path}: CRC-32 mismatch")
    body = buf[:-4]

    offset = newline + 1
    raw_len, offset = _take(body, offset, 4, "manifest length")
    (manifest_len,) = struct.unpack("<I", raw_len)
    raw_manifest, offset = _take(body, offset, manifest_len, "manifest")
    try:
        manifest = json.loads(raw_manifest.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise BadFormat(f"{path}: bad manifest ({exc})") from None

    buckets, dim = manifest["vocab_buckets"], manifest["dim"]
    n_classes = manifest["n_classes"]
    raw, offset = _take(body, offset, 4 * buckets * dim, "embedding table")
    table = np.frombuffer(raw, dtype="<f4").reshape(buckets, dim).copy()
    raw, offset = _take(body, offset, 4 * n_classes * dim, "head weights")
    weights = np.frombuffer(raw, dtype="<f4").reshape(n_classes, dim).copy()
    raw, offset = _take(body, offset, 4 * n_classes, "head bias")
    bias = np.frombuffer(raw, dtype="<f4").copy()
    if offset != len(body):
        raise BadFormat(f"{path}: {len(body) - offset} unexpected trailing bytes")

    names = tuple(manifest["label_names"])
    return Model(
        encoder=EncoderParams(
            table=table, hash_seed=manifest["hash_seed"], max_len=manifest["max_len"]
        ),
        head=HeadParams(weights, bias, names),
        label_names=names,
        train_config=_config_from_dict(manifest["train_config"]),
        distill_info=manifest.get("distill"),
    )
