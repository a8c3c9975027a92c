import math
from typing import List, Literal, Optional

from pydantic import BaseModel, Field, model_validator

LN2 = math.log(2.0)


class LossBreakdown(BaseModel):
    """Per-step loss terms, in nats."""

    model_config = {"frozen": True}

    cross_entropy: float = Field(description="E[-log q(s|Y)] of the demapper")
    entropy: float = Field(description="H(s) of the shaping distribution")
    papr_term: float = Field(description="Batch-mean PAPR of the clipped frames (linear)")
    total: float
    phase: int = Field(default=1, ge=1, le=2)

    @property
    def mi_estimate(self) -> float:
        """Lower bound H - CE on the symbol-wise mutual information, nats."""
        return self.entropy - self.cross_entropy

    @property
    def mi_bits(self) -> float:
        return self.mi_estimate / LN2

    @property
    def papr_db(self) -> float:
        return 10.0 * math.log10(self.papr_term)


class TraceRow(BaseModel):
    step: int
    phase: int
    cross_entropy: float
    entropy: float
    papr_db: float
    total: float

    @classmethod
    def from_breakdown(cls, step: int, loss: LossBreakdown) -> "TraceRow":
        return cls(
            step=step,
            phase=loss.phase,
            cross_entropy=loss.cross_entropy,
            entropy=loss.entropy,
            papr_db=loss.papr_db,
            total=loss.total,
        )


CurveKind = Literal["mi", "ser", "ccdf"]


class MetricCurve(BaseModel):
    label: str
    kind: CurveKind
    x: List[float] = Field(description="SNR in dB, or PAPR0 in dB for CCDF curves")
    y: List[float] = Field(description="bits/symbol, symbol-error rate, or probability")
    n_samples: List[int]
    seed: int

    @model_validator(mode="after")
    def _check(self) -> "MetricCurve":
        if not (len(self.x) == len(self.y) == len(self.n_samples)):
            raise ValueError("x, y and n_samples must have the same length")
        if any(b <= a for a, b in zip(self.x, self.x[1:])):
            raise ValueError("x must be strictly increasing")
        if not all(math.isfinite(v) for v in self.y):
            raise ValueError("y must be finite")
        if self.kind in ("ser", "ccdf") and not all(0.0 <= v <= 1.0 for v in self.y):
            raise ValueError(f"{self.kind} values must lie in [0, 1]")
        if self.kind == "ccdf" and any(b > a for a, b in zip(self.y, self.y[1:])):
            raise ValueError("ccdf must be nonincreasing")
        return self


class SelftestCheck(BaseModel):
    name: str
    passed: bool
    observed: float
    tolerance: float
    detail: Optional[str] = None


class SelftestReport(BaseModel):
    checks: List[SelftestCheck]
    seconds: float

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failed(self) -> List[SelftestCheck]:
        return [c for c in self.checks if not c.passed]
