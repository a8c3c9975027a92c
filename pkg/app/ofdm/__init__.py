from app.ofdm.chain import (
    IMAG_TOLERANCE,
    OfdmFrame,
    channel,
    data_positions,
    demodulate,
    draw_noise,
    hermitian_map,
    modulate,
)
from app.ofdm.papr import ccdf, papr, papr_db, papr_linear, papr_sample

__all__ = [
    "IMAG_TOLERANCE",
    "OfdmFrame",
    "ccdf",
    "channel",
    "data_positions",
    "demodulate",
    "draw_noise",
    "hermitian_map",
    "modulate",
    "papr",
    "papr_db",
    "papr_linear",
    "papr_sample",
]
