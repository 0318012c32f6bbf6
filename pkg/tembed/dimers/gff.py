"""Dirichlet Green's functions and Gaussian free field correlations.

G_Ω is normalized so that G_Ω(z, z′) = −(1/2π) log|z − z′| + O(1). The
n-point function G_{Ω,n} is the sum over pairings of products of G_Ω and
vanishes for odd n.
"""
import logging
from dataclasses import dataclass
from typing import Iterator, List, Sequence, Tuple

import numpy as np
from scipy.spatial.distance import directed_hausdorff

from tembed.core.errors import DimerError

logger = logging.getLogger(__name__)

SERIES_TOL = 1e-12
MAX_IMAGES = 10_000
BOUNDARY_TOL = 1e-12


@dataclass(frozen=True)
class Domain:
    """A disk (center, radius) or an axis-parallel square (center, side)."""
    kind: str  # "disk" or "square"
    center: complex = 0j
    size: float = 1.0

    def contains(self, z: complex) -> bool:
        return self.distance_to_boundary(z) > BOUNDARY_TOL * self.size

    def distance_to_boundary(self, z: complex) -> float:
        d = complex(z) - self.center
        if self.kind == "disk":
            return self.size - abs(d)
        half = self.size / 2
        return min(half - abs(d.real), half - abs(d.imag))

    def boundary_points(self, n: int = 1024) -> np.ndarray:
        """n points spread evenly along the boundary curve."""
        s = np.arange(n) / n
        if self.kind == "disk":
            return self.center + self.size * np.exp(2j * np.pi * s)
        half = self.size / 2
        side, t = np.divmod(4 * s, 1.0)
        start = np.array([1 - 1j, 1 + 1j, -1 + 1j, -1 - 1j])[side.astype(int)]
        step = np.array([2j, -2, -2j, 2])[side.astype(int)]
        return self.center + half * (start + t * step)

    @classmethod
    def parse(cls, kind: str, center: complex = 0j, size: float = 1.0) -> "Domain":
        if kind not in ("disk", "square"):
            raise DimerError("bad_domain", f"unknown domain {kind!r}; expected disk or square")
        if size <= 0:
            raise DimerError("bad_domain", f"domain size must be positive, got {size}")
        return cls(kind, complex(center), float(size))


def _disk_green(domain: Domain, z: complex, w: complex) -> float:
    R = domain.size
    a = (complex(z) - domain.center) / R
    b = (complex(w) - domain.center) / R
    return float(-np.log(abs((a - b) / (1 - np.conj(b) * a))) / (2 * np.pi))


def _strip_green(a: float, z: complex, w: complex) -> float:
    """Green's function of the strip 0 < Re z < a, via ζ = exp(iπz/a) onto the upper half-plane."""
    zeta = np.exp(1j * np.pi * z / a)
    xi = np.exp(1j * np.pi * w / a)
    return float(-np.log(abs((zeta - xi) / (zeta - np.conj(xi)))) / (2 * np.pi))


def _square_green(domain: Domain, z: complex, w: complex) -> float:
    """Strip Green's function reflected across the top and bottom sides.

    Terms decay like exp(−π|Δy|/a); the series stops once a term pair falls
    below SERIES_TOL.
    """
    a = domain.size
    corner = domain.center - (a / 2) * (1 + 1j)
    z, w = complex(z) - corner, complex(w) - corner
    total = _strip_green(a, z, w) - _strip_green(a, z, np.conj(w))
    for n in range(1, MAX_IMAGES):
        term = 0.0
        for shift in (2j * n * a, -2j * n * a):
            term += _strip_green(a, z, w + shift) - _strip_green(a, z, np.conj(w) + shift)
        total += term
        if abs(term) < SERIES_TOL:
            return float(total)
    logger.warning(f"Square Green's function series did not reach {SERIES_TOL} after {MAX_IMAGES} images")
    return float(total)


def green_function(domain: Domain, z: complex, w: complex) -> float:
    """G_Ω(z, w) for distinct interior points.

    Raises:
        DimerError: if a point is not interior or the points coincide
    """
    for p in (z, w):
        if not domain.contains(p):
            raise DimerError("bad_point", f"{p} is not an interior point of the {domain.kind}", str(p))
    if abs(complex(z) - complex(w)) <= BOUNDARY_TOL * domain.size:
        raise DimerError("bad_point", "Green's function evaluated at coincident points", str(z))
    if domain.kind == "disk":
        return _disk_green(domain, z, w)
    return _square_green(domain, z, w)


def pairings(items: Sequence[int]) -> Iterator[List[Tuple[int, int]]]:
    """All perfect pairings of the items."""
    items = list(items)
    if not items:
        yield []
        return
    first = items.pop(0)
    for i, item in enumerate(items):
        for rest in pairings(items[:i] + items[i + 1:]):
            yield [(first, item)] + rest


def gff_correlation(domain: Domain, points: Sequence[complex]) -> float:
    """G_{Ω,n}(z_1, …, z_n): sum over pairings of ∏G_Ω."""
    n = len(points)
    if n % 2:
        return 0.0
    G = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            G[i, j] = G[j, i] = green_function(domain, points[i], points[j])
    return float(sum(np.prod([G[i, j] for i, j in p]) for p in pairings(range(n))))


def gff_reference(domain: Domain, points: Sequence[complex]) -> float:
    """π^{−n/2}·G_{Ω,n}, the limit of the n-point height correlations."""
    n = len(points)
    for i in range(n):
        for j in range(i + 1, n):
            if abs(complex(points[i]) - complex(points[j])) <= BOUNDARY_TOL * domain.size:
                raise DimerError("bad_point", f"points {i} and {j} coincide", str(points[i]))
        if not domain.contains(points[i]):
            raise DimerError("bad_point", f"{points[i]} is not an interior point of the {domain.kind}", str(points[i]))
    return gff_correlation(domain, points) * np.pi ** (-n / 2)


def hausdorff_distance(domain: Domain, boundary: Sequence[complex], n: int = 1024) -> float:
    """Hausdorff distance between boundary points of T and the boundary of the domain."""
    a = np.asarray(boundary, dtype=complex)
    if a.size == 0:
        raise DimerError("bad_point", "no boundary points to compare with the domain")
    b = domain.boundary_points(n)
    u = np.column_stack([a.real, a.imag])
    v = np.column_stack([b.real, b.imag])
    return float(max(directed_hausdorff(u, v)[0], directed_hausdorff(v, u)[0]))
