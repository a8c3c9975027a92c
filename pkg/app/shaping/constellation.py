from dataclasses import dataclass
from typing import Dict, List, Tuple, Union

import numpy as np

from app.core import Tensor
from app.errors import DegenerateConstellationError, DimensionError

LN2 = np.log(2.0)


@dataclass(frozen=True)
class ShapedConstellation:
    points: Tensor  # [M, 2], gamma-scaled
    probs: Tensor   # [M]
    gamma: Tensor   # scalar

    @property
    def m(self) -> int:
        return self.probs.shape[0]

    def complex_points(self) -> np.ndarray:
        return self.points.data[:, 0] + 1j * self.points.data[:, 1]

    def average_energy(self) -> float:
        return float(np.sum(self.probs.data * np.sum(self.points.data ** 2, axis=-1)))

    def entropy_nats(self) -> float:
        p = self.probs.data
        nz = p > 0
        return float(-np.sum(p[nz] * np.log(p[nz])))

    def entropy_bits(self) -> float:
        return self.entropy_nats() / LN2


def points_to_pairs(points: Union[Tensor, np.ndarray]) -> Tensor:
    if isinstance(points, Tensor):
        return points
    points = np.asarray(points)
    if np.iscomplexobj(points):
        return Tensor(np.stack([points.real, points.imag], axis=-1))
    return Tensor(points)


def normalize(points: Union[Tensor, np.ndarray], probs: Union[Tensor, np.ndarray]) -> ShapedConstellation:
    """
    Scale by gamma = (sum_i p_i |x_i|^2)^(-1/2) so the average symbol power is one.
    """
    points = points_to_pairs(points)
    probs = probs if isinstance(probs, Tensor) else Tensor(probs)
    if points.ndim != 2 or points.shape[1] != 2 or points.shape[0] != probs.shape[0]:
        raise DimensionError(f"points {points.shape} do not match probs {probs.shape}")

    energy = (probs * (points * points).sum(axis=-1)).sum()
    if energy.data <= 0.0:
        raise DegenerateConstellationError("constellation has zero average energy")
    gamma = energy ** -0.5
    return ShapedConstellation(points=points * gamma, probs=probs, gamma=gamma)


def format_constellation(constellation: ShapedConstellation, header: Dict[str, object]) -> str:
    """Text table: '# key=value' header lines, then one `index re im prob` line per point."""
    lines = [f"# {key}={value}" for key, value in header.items()]
    lines.append(f"# entropy_bits={constellation.entropy_bits()!r}")
    lines.append("# index re im prob")
    pts = constellation.points.data
    for i, p in enumerate(constellation.probs.data):
        lines.append(f"{i} {float(pts[i, 0])!r} {float(pts[i, 1])!r} {float(p)!r}")
    return "\n".join(lines) + "\n"


def parse_constellation(text: str) -> Tuple[np.ndarray, np.ndarray]:
    """Inverse of format_constellation: (complex points, probs)."""
    rows: List[Tuple[int, float, float, float]] = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        index, re, im, prob = line.split()
        rows.append((int(index), float(re), float(im), float(prob)))
    rows.sort()
    points = np.array([r[1] + 1j * r[2] for r in rows])
    probs = np.array([r[3] for r in rows])
    return points, probs
