import hashlib
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, ValidationInfo, field_validator

from app.errors import ConfigError


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


def parse_grid(value: Any) -> List[float]:
    """
    Accepts `start:stop:step` (stop inclusive), a comma list, or a sequence.
    """
    if isinstance(value, (int, float)):
        return [float(value)]
    if isinstance(value, str):
        text = value.strip()
        if ":" in text:
            start, stop, step = (float(part) for part in text.split(":"))
            if step <= 0:
                raise ValueError("grid step must be positive")
            count = int(np.floor((stop - start) / step + 1e-9)) + 1
            return [round(start + i * step, 10) for i in range(count)]
        return [float(part) for part in text.split(",") if part.strip()]
    return [float(v) for v in value]


class TrainConfig(BaseModel):
    """Hyperparameters of one two-phase training run."""

    model_config = ConfigDict(frozen=True, populate_by_name=True, extra="forbid")

    m: int = Field(default=16, ge=2, description="Constellation size M")
    n_data: int = Field(default=16, ge=1, description="Data subcarriers per frame (4N total)")
    snr_db: float = Field(default=10.0, description="Training SNR in dB")
    lam: float = Field(default=0.01, ge=0.0, alias="lambda", description="PAPR penalty weight")
    tau: float = Field(default=1.0, gt=0.0, description="Gumbel-Softmax temperature")
    # 3000 symbols rounded up to whole 16-subcarrier frames
    batch_symbols: int = Field(default=3008, ge=1)
    # 150 epochs of 30 mini-batches per phase
    steps_phase1: int = Field(default=4500, ge=0)
    steps_phase2: int = Field(default=4500, ge=0)
    lr: float = Field(default=0.01, gt=0.0)
    seed: int = Field(default=0, ge=0)

    @field_validator("n_data")
    @classmethod
    def _n_data_power_of_two(cls, v: int) -> int:
        if not _is_power_of_two(v):
            raise ValueError("n_data must be a power of two")
        return v

    @field_validator("batch_symbols")
    @classmethod
    def _whole_frames(cls, v: int, info: ValidationInfo) -> int:
        n_data = info.data.get("n_data")
        if n_data and v % n_data != 0:
            raise ValueError("batch_symbols must be divisible by n_data (whole frames)")
        return v

    @property
    def frames_per_batch(self) -> int:
        return self.batch_symbols // self.n_data


class SlmConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    u: int = Field(default=128, ge=1, description="Number of candidate phase sequences")
    seed: int = Field(default=0, ge=0)


class ExperimentConfig(TrainConfig):
    """
    TrainConfig plus evaluation fields; the flat key=value file format.
    """

    seed: Optional[int] = Field(default=None, ge=0)
    snr_grid: List[float] = Field(default_factory=lambda: parse_grid("0:20:2"))
    n_frames: int = Field(default=2000, ge=1)
    n_symbols: int = Field(default=100_000, ge=1)
    thresholds_db: List[float] = Field(default_factory=lambda: parse_grid("0:16:0.25"))
    out_dir: Optional[str] = None
    threads: int = Field(default=1, ge=1)
    cr_db: float = 3.0
    slm_u: int = Field(default=128, ge=1)
    reference_steps: int = Field(default=2000, ge=0)

    @field_validator("snr_grid", "thresholds_db", mode="before")
    @classmethod
    def _parse_grid(cls, v: Any) -> List[float]:
        return parse_grid(v)

    @field_validator("snr_grid", "thresholds_db")
    @classmethod
    def _strictly_increasing(cls, v: List[float]) -> List[float]:
        if not v:
            raise ValueError("grid must not be empty")
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("grid must be strictly increasing")
        return v

    def require_seed(self) -> int:
        if self.seed is None:
            raise ConfigError("seed", "randomized commands require an explicit seed")
        return self.seed

    def require_out_dir(self) -> Path:
        if not self.out_dir:
            raise ConfigError("out_dir", "an output directory is required")
        return Path(self.out_dir)

    def to_train_config(self) -> TrainConfig:
        fields = {name: getattr(self, name) for name in TrainConfig.model_fields}
        fields["seed"] = self.require_seed()
        return TrainConfig(**fields)

    def slm_config(self) -> SlmConfig:
        return SlmConfig(u=self.slm_u, seed=self.require_seed())

    def to_cfg_text(self) -> str:
        lines = []
        for key, value in sorted(self.model_dump(by_alias=True).items()):
            if value is None:
                continue
            if isinstance(value, list):
                value = ",".join(repr(float(v)) for v in value)
            lines.append(f"{key}={value}")
        return "\n".join(lines) + "\n"

    def config_hash(self) -> str:
        return hashlib.sha256(self.to_cfg_text().encode("utf-8")).hexdigest()


def read_cfg_file(path: Path) -> Dict[str, str]:
    """Parse a flat key=value file; '#' starts a comment."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise ConfigError("config", f"cannot read {path}: {e}") from e

    values: Dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected key=value, got '{raw.strip()}'")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


def resolve_experiment_config(
    path: Optional[Path] = None,
    overrides: Optional[Dict[str, Any]] = None,
) -> ExperimentConfig:
    """Merge defaults < file < overrides and validate; errors name the offending key."""
    merged: Dict[str, Any] = {}
    if path is not None:
        merged.update(read_cfg_file(path))
    merged.update({k: v for k, v in (overrides or {}).items() if v is not None})
    try:
        return ExperimentConfig.model_validate(merged)
    except ValidationError as e:
        first = e.errors()[0]
        key = ".".join(str(part) for part in first["loc"]) or "<config>"
        raise ConfigError(key, first["msg"]) from e
