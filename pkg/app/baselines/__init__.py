from app.baselines.qam import UniformQam, ml_detect, qam_constellation
from app.baselines.clipping import amp_clip, clip_threshold
from app.baselines.slm import SLM_PHASES, SlmSelection, slm_derotate, slm_phase_sequences, slm_select

__all__ = [
    "SLM_PHASES",
    "SlmSelection",
    "UniformQam",
    "amp_clip",
    "clip_threshold",
    "ml_detect",
    "qam_constellation",
    "slm_derotate",
    "slm_phase_sequences",
    "slm_select",
]
