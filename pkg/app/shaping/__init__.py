from app.shaping.networks import (
    HIDDEN_WIDTHS,
    NetConfig,
    ShapingNetworks,
    SymbolDistribution,
    nn1_distribution,
    nn2_constellation,
    nn3_demap,
    nn3_log_posterior,
)
from app.shaping.gumbel import PROB_FLOOR, SamplerStats, SymbolDraw, gumbel_draw, sample_gumbel, ste_combine
from app.shaping.constellation import (
    ShapedConstellation,
    format_constellation,
    normalize,
    parse_constellation,
)

__all__ = [
    "HIDDEN_WIDTHS",
    "NetConfig",
    "PROB_FLOOR",
    "SamplerStats",
    "ShapedConstellation",
    "ShapingNetworks",
    "SymbolDistribution",
    "SymbolDraw",
    "format_constellation",
    "gumbel_draw",
    "nn1_distribution",
    "nn2_constellation",
    "nn3_demap",
    "nn3_log_posterior",
    "normalize",
    "parse_constellation",
    "sample_gumbel",
    "ste_combine",
]
