from typing import Optional

from app.core import Mlp
from app.errors import SystemKindError
from app.models.config import ExperimentConfig
from app.shaping import ShapingNetworks
from app.systems.base import LinkSystem, Transmission, received_subcarriers

SYSTEM_KINDS = ("shaped", "uniform", "clip", "slm")


def get_system(
    kind: str,
    cfg: ExperimentConfig,
    nets: Optional[ShapingNetworks] = None,
    demapper: Optional[Mlp] = None,
    snr_db: Optional[float] = None,
) -> LinkSystem:
    """Build the link system named by `kind` for the configured M and N."""
    if kind == "shaped":
        from app.systems.shaped import ShapedSystem

        if nets is None:
            raise SystemKindError("the shaped system needs trained networks")
        return ShapedSystem(nets, cfg.snr_db if snr_db is None else snr_db, cfg.n_data)

    if kind not in SYSTEM_KINDS:
        raise SystemKindError(f"unknown system '{kind}', expected one of {', '.join(SYSTEM_KINDS)}")

    from app.baselines import qam_constellation

    qam = qam_constellation(cfg.m)
    if kind == "uniform":
        from app.systems.uniform import UniformQamSystem

        return UniformQamSystem(qam, cfg.n_data, demapper)
    if kind == "clip":
        from app.systems.clipping import ClippingSystem

        return ClippingSystem(qam, cfg.n_data, cfg.cr_db)

    from app.systems.slm import SlmSystem

    return SlmSystem(qam, cfg.n_data, cfg.slm_config())


__all__ = ["SYSTEM_KINDS", "LinkSystem", "Transmission", "get_system", "received_subcarriers"]
