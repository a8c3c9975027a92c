import math

from pydantic import BaseModel, Field, model_validator

# E[x^2(n)] of the clipped ACO signal under unit average symbol power
ACO_SIGNAL_POWER = 0.25


class NoiseSpec(BaseModel):
    model_config = {"frozen": True}

    sigma2: float = Field(..., ge=0.0, description="Noise variance per real time sample (linear).")
    snr_db: float = Field(..., description="Electrical SNR E[x^2]/sigma^2 in dB.")

    @classmethod
    def from_snr_db(cls, snr_db: float, signal_power: float = ACO_SIGNAL_POWER) -> "NoiseSpec":
        return cls(sigma2=signal_power / 10.0 ** (snr_db / 10.0), snr_db=snr_db)

    @classmethod
    def noiseless(cls) -> "NoiseSpec":
        return cls(sigma2=0.0, snr_db=math.inf)


class PaprSample(BaseModel):
    model_config = {"frozen": True}

    value_linear: float = Field(..., ge=1.0 - 1e-12)
    value_db: float

    @model_validator(mode="after")
    def _consistent(self) -> "PaprSample":
        if abs(10.0 * math.log10(self.value_linear) - self.value_db) > 1e-9:
            raise ValueError("value_db must equal 10*log10(value_linear)")
        return self

    @classmethod
    def from_linear(cls, value: float) -> "PaprSample":
        return cls(value_linear=value, value_db=10.0 * math.log10(value))
