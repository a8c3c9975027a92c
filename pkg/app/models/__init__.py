from app.models.config import (
    ExperimentConfig,
    SlmConfig,
    TrainConfig,
    parse_grid,
    read_cfg_file,
    resolve_experiment_config,
)
from app.models.results import LossBreakdown, MetricCurve, SelftestCheck, SelftestReport, TraceRow
from app.models.signals import ACO_SIGNAL_POWER, NoiseSpec, PaprSample

__all__ = [
    "ACO_SIGNAL_POWER",
    "ExperimentConfig",
    "LossBreakdown",
    "MetricCurve",
    "NoiseSpec",
    "PaprSample",
    "SelftestCheck",
    "SelftestReport",
    "SlmConfig",
    "TraceRow",
    "TrainConfig",
    "parse_grid",
    "read_cfg_file",
    "resolve_experiment_config",
]
