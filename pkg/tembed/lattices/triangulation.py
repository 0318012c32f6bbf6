"""Random valid triangulations: isoradial triangular lattices with random train tracks.

The honeycomb has three families of train tracks, one per lattice
direction: ξ_i between the lines i and i + 1, ψ_j between j and j + 1,
and ζ_s between the lines i + j = s and s + 1. Placing

    v(i, j) = Σ_{k<i} e^{iξ_k} + Σ_{l<j} e^{iψ_l} − Σ_{s<i+j} e^{iζ_s}

puts every up triangle on the unit circle around v(i, j) − e^{iζ_{i+j}} and
every down triangle on the unit circle around v(i + 1, j) + e^{iψ_j}. The
black angles at an interior vertex are half the arcs ψ − ξ, ζ − ψ and
ξ + 2π − ζ, which sum to π whatever the angles, so each seed gives an
irregular t-embedding that satisfies the angle condition exactly.
"""
import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from tembed.core.errors import LatticeError
from tembed.core.models import Mode
from tembed.embedding.tembedding import TEmbedding
from tembed.lattices.base import LatticeBuilder, LatticeBundle
from tembed.lattices.honeycomb import HoneycombData, triangular_tembedding

logger = logging.getLogger(__name__)

# ξ, ψ, ζ of the equilateral lattice with side √3
BASE_ANGLES = (-np.pi / 6, np.pi / 2, 7 * np.pi / 6)
# half the gap between families; |jitter| < 1 keeps every triangle acute and counterclockwise
MAX_SHIFT = np.pi / 6
DEFAULT_JITTER = 0.5


@dataclass(frozen=True)
class TrackAngles:
    """Angles of the three train-track families plus a global rotation."""
    xi: np.ndarray
    psi: np.ndarray
    zeta: np.ndarray
    rotation: float

    def to_dict(self) -> dict:
        return {
            "xi": self.xi.tolist(),
            "psi": self.psi.tolist(),
            "zeta": self.zeta.tolist(),
            "rotation": self.rotation,
        }


def random_track_angles(size: int, seed: int, jitter: float = DEFAULT_JITTER) -> TrackAngles:
    """Seeded track angles, each within jitter·π/6 of the equilateral value.

    Raises:
        LatticeError: if jitter is outside [0, 1)
    """
    if not 0 <= jitter < 1:
        raise LatticeError("bad_jitter", f"jitter must lie in [0, 1), got {jitter}", value=float(jitter))
    rng = np.random.default_rng(seed)
    shift = jitter * MAX_SHIFT
    xi = BASE_ANGLES[0] + rng.uniform(-shift, shift, size)
    psi = BASE_ANGLES[1] + rng.uniform(-shift, shift, size)
    zeta = BASE_ANGLES[2] + rng.uniform(-shift, shift, 2 * size)
    return TrackAngles(xi, psi, zeta, float(rng.uniform(0, 2 * np.pi)))


def track_positions(angles: TrackAngles, size: int, delta: float) -> np.ndarray:
    """v(i, j) for 0 ≤ i, j ≤ size, scaled so the equilateral lattice has side δ."""
    a = np.concatenate([[0], np.cumsum(np.exp(1j * angles.xi))])
    b = np.concatenate([[0], np.cumsum(np.exp(1j * angles.psi))])
    c = np.concatenate([[0], np.cumsum(np.exp(1j * angles.zeta))])
    i, j = np.meshgrid(np.arange(size + 1), np.arange(size + 1), indexing="ij")
    z = a[i] + b[j] - c[i + j]
    return delta / np.sqrt(3) * np.exp(1j * angles.rotation) * z


def circumradii(te: TEmbedding) -> Tuple[float, float]:
    """Smallest and largest circumradius over the triangles of T."""
    radii = []
    for f in te.faces:
        p, q, r = te.positions[list(f.cycle)]
        a, b, c = abs(q - r), abs(r - p), abs(p - q)
        area = abs(((np.conj(q - p)) * (r - p)).imag) / 2
        radii.append(a * b * c / (4 * area))
    return float(min(radii)), float(max(radii))


class RandomTriangulation(LatticeBuilder):
    """Isoradial triangular lattice with seeded random train-track angles."""

    def __init__(self, size: int, delta: float = 1.0, mode: Mode = Mode.FINITE, seed: int = 0,
                 jitter: float = DEFAULT_JITTER):
        super().__init__(size, delta, mode)
        self.seed = seed
        self.jitter = float(jitter)
        self.angles = random_track_angles(self.size, seed, self.jitter)

    @property
    def kind(self) -> str:
        return "triangulation"

    def tembedding(self) -> TEmbedding:
        z = track_positions(self.angles, self.size, self.delta)
        te, self.blacks, self.whites = triangular_tembedding(
            self.size, lambda i, j: complex(z[i, j]), f"triangulation-{self.size}-s{self.seed}", self.mode,
            {"lattice": "triangulation", "delta": self.delta, "seed": self.seed, "jitter": self.jitter},
        )
        return te

    def decorate(self, bundle: LatticeBundle) -> None:
        bundle.data = HoneycombData(self.blacks, self.whites)
        bundle.meta["seed"] = self.seed
        bundle.meta["jitter"] = self.jitter
        bundle.meta["track_angles"] = self.angles.to_dict()
        bundle.meta["circumradius"] = list(circumradii(bundle.te))
