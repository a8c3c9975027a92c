"""
Binary checkpoint of a trained model.

Layout: magic b"OSHP", u16 version, a UTF-8 `key=value` metadata block
terminated by an empty line, a u32 tensor count, then per tensor a u16 name
length, the name, a u8 rank, u32 dims and the raw little-endian float64
values. All integers are little-endian.
"""
import logging
import struct
from pathlib import Path
from typing import Dict, Tuple

import numpy as np

from app.errors import CheckpointError
from app.models.config import TrainConfig
from app.services.trainer_service import TrainRun
from app.shaping import NetConfig, ShapingNetworks

logger = logging.getLogger(__name__)

MAGIC = b"OSHP"
VERSION = 1

_META_KEYS = (
    "m", "n_data", "snr_db", "lambda", "tau", "batch_symbols",
    "steps_phase1", "steps_phase2", "lr", "seed", "phase", "final_loss",
)


def _metadata(run: TrainRun) -> str:
    values = run.config.model_dump(by_alias=True)
    values["phase"] = run.phase
    values["final_loss"] = run.final_loss
    return "".join(f"{key}={values[key]!r}\n" for key in _META_KEYS) + "\n"


def encode_checkpoint(run: TrainRun) -> bytes:
    params = run.nets.parameters()
    chunks = [MAGIC, struct.pack("<H", VERSION), _metadata(run).encode("utf-8")]
    chunks.append(struct.pack("<I", len(params)))
    for name in sorted(params):
        data = np.ascontiguousarray(params[name].data, dtype="<f8")
        encoded = name.encode("utf-8")
        chunks.append(struct.pack("<H", len(encoded)))
        chunks.append(encoded)
        chunks.append(struct.pack("<B", data.ndim))
        chunks.append(struct.pack(f"<{data.ndim}I", *data.shape))
        chunks.append(data.tobytes())
    return b"".join(chunks)


class _Reader:
    def __init__(self, blob: bytes):
        self.blob = blob
        self.offset = 0

    def take(self, size: int, what: str) -> bytes:
        if self.offset + size > len(self.blob):
            raise CheckpointError(f"truncated checkpoint while reading {what}", self.offset)
        chunk = self.blob[self.offset:self.offset + size]
        self.offset += size
        return chunk

    def unpack(self, fmt: str, what: str) -> Tuple:
        return struct.unpack(fmt, self.take(struct.calcsize(fmt), what))

    def line(self) -> str:
        end = self.blob.find(b"\n", self.offset)
        if end < 0:
            raise CheckpointError("truncated checkpoint metadata", self.offset)
        raw = self.blob[self.offset:end]
        self.offset = end + 1
        try:
            return raw.decode("utf-8")
        except UnicodeDecodeError as e:
            raise CheckpointError("metadata is not valid UTF-8", self.offset) from e


def _parse_metadata(reader: _Reader) -> Dict[str, str]:
    meta: Dict[str, str] = {}
    while True:
        start = reader.offset
        line = reader.line()
        if not line:
            break
        if "=" not in line:
            raise CheckpointError(f"malformed metadata line '{line}'", start)
        key, value = line.split("=", 1)
        meta[key] = value
    missing = [k for k in _META_KEYS if k not in meta]
    if missing:
        raise CheckpointError(f"metadata is missing keys {missing}", reader.offset)
    return meta


def decode_checkpoint(blob: bytes) -> TrainRun:
    reader = _Reader(blob)
    if reader.take(len(MAGIC), "magic") != MAGIC:
        raise CheckpointError("bad magic, not a checkpoint file", 0)
    (version,) = reader.unpack("<H", "version")
    if version != VERSION:
        raise CheckpointError(f"unsupported checkpoint version {version}", len(MAGIC))

    meta = _parse_metadata(reader)
    try:
        config = TrainConfig.model_validate({
            "m": int(meta["m"]),
            "n_data": int(meta["n_data"]),
            "snr_db": float(meta["snr_db"]),
            "lambda": float(meta["lambda"]),
            "tau": float(meta["tau"]),
            "batch_symbols": int(meta["batch_symbols"]),
            "steps_phase1": int(meta["steps_phase1"]),
            "steps_phase2": int(meta["steps_phase2"]),
            "lr": float(meta["lr"]),
            "seed": int(meta["seed"]),
        })
        phase = int(meta["phase"])
        final_loss = float(meta["final_loss"])
    except ValueError as e:
        raise CheckpointError(f"invalid metadata: {e}", reader.offset) from e

    (count,) = reader.unpack("<I", "tensor count")
    tensors: Dict[str, np.ndarray] = {}
    for _ in range(count):
        (name_len,) = reader.unpack("<H", "name length")
        name = reader.take(name_len, "tensor name").decode("utf-8", errors="replace")
        (rank,) = reader.unpack("<B", f"rank of {name}")
        shape = reader.unpack(f"<{rank}I", f"dims of {name}")
        size = int(np.prod(shape, dtype=np.int64))
        raw = reader.take(8 * size, f"values of {name}")
        tensors[name] = np.frombuffer(raw, dtype="<f8").reshape(shape).astype(np.float64)

    if reader.offset != len(blob):
        raise CheckpointError("trailing bytes after last tensor", reader.offset)

    # build into fresh networks, so a failed load leaves nothing half-populated
    nets = ShapingNetworks(NetConfig(m=config.m), np.random.default_rng(0))
    params = nets.parameters()
    if set(tensors) != set(params):
        missing = sorted(set(params) - set(tensors))
        extra = sorted(set(tensors) - set(params))
        raise CheckpointError(f"tensor set mismatch: missing {missing}, unexpected {extra}", reader.offset)
    for name, values in tensors.items():
        if values.shape != params[name].data.shape:
            raise CheckpointError(
                f"tensor {name} has shape {values.shape}, expected {params[name].data.shape}", reader.offset
            )
        params[name].data = values

    return TrainRun(config=config, nets=nets, phase=phase, final_loss=final_loss)


def checkpoint_save(run: TrainRun, path: Path) -> None:
    blob = encode_checkpoint(run)
    Path(path).write_bytes(blob)
    logger.info("Saved checkpoint to %s (%d bytes)", path, len(blob), extra={"path": str(path)})


def checkpoint_load(path: Path) -> TrainRun:
    try:
        blob = Path(path).read_bytes()
    except OSError as e:
        raise CheckpointError(f"cannot read checkpoint {path}: {e}") from e
    run = decode_checkpoint(blob)
    logger.info(
        "Loaded checkpoint %s: M=%d snr=%.2f dB phase %d",
        path, run.config.m, run.config.snr_db, run.phase, extra={"path": str(path)},
    )
    return run
