"""Edge-relation holomorphicity on the honeycomb.

Λ is the triangular lattice together with the triangle centers; its
rhombi are the triangular edges shared by two triangles, with the two
centers as the other diagonal (half-angle π/6 at the lattice points).
An s-holomorphic F lives on the rhombi: for every corner c = (p, u),
p a lattice point and u a center, Re(η̄_c F) agrees on the two rhombi
meeting at c, with η_c = ς·exp(−i/2·arg(p − u)).

The corners (p, u) with u an up center are the edges of the honeycomb
whose hexagons surround the down centers. X(e) = Re(η̄_e F) on those
edges satisfies, around every hexagon e1 … e6,

    X(e4) − X(e1) = X(e2) − X(e5) = X(e6) − X(e3),   Σ X(e_k) = 0.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.linalg import null_space

from tembed.core.errors import LatticeError
from tembed.core.models import DiagnosticsReport
from tembed.lattices.honeycomb import CUBE_ROOT, OMEGA

logger = logging.getLogger(__name__)

SIGMA = np.exp(1j * np.pi / 4)
RELATION_TOL = 1e-10

Corner = Tuple[int, int]  # (lattice point, center)

# Hexagon around the down triangle at a: (point offset, up-center offset) and its η.
HEXAGON = (
    ((1, 0), (1, 0), CUBE_ROOT),
    ((1, 1), (1, 0), 1.0 + 0j),
    ((1, 1), (0, 1), CUBE_ROOT ** 2),
    ((0, 1), (0, 1), CUBE_ROOT),
    ((0, 1), (0, 0), 1.0 + 0j),
    ((1, 0), (0, 0), CUBE_ROOT ** 2),
)


@dataclass
class CGSData:
    """Rhombic lattice of triangle points and centers over a size × size parallelogram."""
    size: int
    delta: float
    positions: np.ndarray  # lattice points, then up centers, then down centers
    point: Dict[Tuple[int, int], int] = field(default_factory=dict)
    up: Dict[Tuple[int, int], int] = field(default_factory=dict)
    down: Dict[Tuple[int, int], int] = field(default_factory=dict)
    rhombi: List[Tuple[int, int, int, int]] = field(default_factory=list)  # (p, u, q, u′)
    corners: Dict[Corner, List[int]] = field(default_factory=dict)  # corner -> rhombi

    def corner_eta(self, c: Corner) -> complex:
        p, u = c
        return complex(SIGMA * np.exp(-0.5j * np.angle(self.positions[p] - self.positions[u])))

    def to_dict(self) -> dict:
        return {"size": self.size, "n_rhombi": len(self.rhombi), "n_corners": len(self.corners)}


@dataclass
class CGSField:
    """Complex F per rhombus and the edge values X of the honeycomb."""
    F: np.ndarray
    X: Dict[Corner, float]

    def to_dict(self) -> dict:
        return {"n_rhombi": int(len(self.F)), "n_edges": len(self.X)}


def cgs_lattice(size: int, delta: float = 1.0) -> CGSData:
    """Points i + jω, centers of the up and down triangles, and the interior rhombi."""
    if size < 2:
        raise LatticeError("bad_size", f"lattice size must be at least 2, got {size}", value=float(size))
    positions: List[complex] = []
    data = CGSData(size, delta, np.empty(0, dtype=complex))
    for j in range(size + 1):
        for i in range(size + 1):
            data.point[(i, j)] = len(positions)
            positions.append(delta * (i + j * OMEGA))
    for j in range(size):
        for i in range(size):
            a = i + j * OMEGA
            data.up[(i, j)] = len(positions)
            positions.append(delta * (a + (1 + OMEGA) / 3))
    for j in range(size):
        for i in range(size):
            a = i + j * OMEGA
            data.down[(i, j)] = len(positions)
            positions.append(delta * (a + 2 * (1 + OMEGA) / 3))
    data.positions = np.array(positions)

    P, U, D = data.point, data.up, data.down
    for j in range(size + 1):
        for i in range(size + 1):
            if i < size and 0 < j < size:
                data.rhombi.append((P[(i, j)], D[(i, j - 1)], P[(i + 1, j)], U[(i, j)]))
            if 0 < i < size and j < size:
                data.rhombi.append((P[(i, j)], U[(i, j)], P[(i, j + 1)], D[(i - 1, j)]))
            if i < size and j < size:
                data.rhombi.append((P[(i + 1, j)], D[(i, j)], P[(i, j + 1)], U[(i, j)]))
    for k, (p, u, q, v) in enumerate(data.rhombi):
        for c in ((p, u), (q, u), (p, v), (q, v)):
            data.corners.setdefault(c, []).append(k)
    logger.debug(f"CGS lattice {size}: {len(data.rhombi)} rhombi, {len(data.corners)} corners")
    return data


def shol_constraints(data: CGSData) -> np.ndarray:
    """Rows Re(η̄_c F(z1)) − Re(η̄_c F(z2)) over (Re F, Im F) per rhombus."""
    n = len(data.rhombi)
    rows = []
    for c, rh in data.corners.items():
        if len(rh) < 2:
            continue
        e = data.corner_eta(c)
        row = np.zeros(2 * n)
        row[2 * rh[0]], row[2 * rh[0] + 1] = e.real, e.imag
        row[2 * rh[1]], row[2 * rh[1] + 1] = -e.real, -e.imag
        rows.append(row)
    return np.array(rows) if rows else np.zeros((0, 2 * n))


def shol_residual(data: CGSData, F: np.ndarray) -> float:
    """Largest violation of the corner condition."""
    A = shol_constraints(data)
    if not len(A):
        return 0.0
    x = np.column_stack([np.real(F), np.imag(F)]).ravel()
    return float(np.max(np.abs(A @ x)))


def random_shol(data: CGSData, seed: int = 0) -> np.ndarray:
    """Seeded random s-holomorphic F per rhombus from the null space of the corner conditions."""
    basis = null_space(shol_constraints(data))
    if basis.shape[1] == 0:
        raise LatticeError("trivial", "no non-zero s-holomorphic function on the CGS lattice")
    x = basis @ np.random.default_rng(seed).normal(size=basis.shape[1])
    return x[0::2] + 1j * x[1::2]


def edge_values(data: CGSData, F: np.ndarray) -> CGSField:
    """X(e) = Re(η̄_e F) on the hexagon edges, averaged over the rhombi at e."""
    X: Dict[Corner, float] = {}
    for (i, j) in data.down:
        a = np.array([i, j])
        for (po, uo, eta) in HEXAGON:
            p = data.point[tuple(a + po)]
            u = data.up.get(tuple(a + uo))
            if u is None or (p, u) in X or (p, u) not in data.corners:
                continue
            X[(p, u)] = float(np.mean([np.real(np.conj(eta) * F[k]) for k in data.corners[(p, u)]]))
    return CGSField(np.asarray(F, dtype=complex), X)


def hexagon_edges(data: CGSData, i: int, j: int) -> Optional[List[Corner]]:
    """The six edges around the down center (i, j), or None at the boundary."""
    edges = []
    for po, uo, _ in HEXAGON:
        key = (i + uo[0], j + uo[1])
        if key not in data.up:
            return None
        edges.append((data.point[(i + po[0], j + po[1])], data.up[key]))
    return edges


def cgs_relations(data: CGSData, field_: CGSField) -> DiagnosticsReport:
    """Edge relations and sum rule on every complete hexagon."""
    report = DiagnosticsReport(subject=f"CGS relations on size {data.size}")
    worst_rel = worst_sum = 0.0
    count = 0
    for (i, j) in sorted(data.down):
        edges = hexagon_edges(data, i, j)
        if edges is None or any(e not in field_.X for e in edges):
            continue
        x = [field_.X[e] for e in edges]
        diffs = (x[3] - x[0], x[1] - x[4], x[5] - x[2])
        rel = max(diffs) - min(diffs)
        total = abs(sum(x))
        worst_rel, worst_sum = max(worst_rel, rel), max(worst_sum, total)
        count += 1
        if max(rel, total) > RELATION_TOL:
            report.add("cgs", f"d{i}_{j}", f"hexagon relation residual {max(rel, total):.3e}", value=max(rel, total))
    report.metrics["max_edge_relation"] = worst_rel
    report.metrics["max_sum"] = worst_sum
    report.metrics["n_hexagons"] = float(count)
    return report
