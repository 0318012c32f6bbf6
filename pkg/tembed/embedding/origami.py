"""Origami square root function η and origami map O.

η is a unit complex number per face with η̄_b η̄_w = dT(bw*)/|dT(bw*)|
up to sign. A global choice of signs is impossible in general, so the
field keeps one value per face chosen along a BFS tree, the sign of the
defining relation on every edge, and a branch flag per interior vertex.
Consumers only use sign-invariant quantities (η², φ, projections onto
η·ℝ).
"""
import logging
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional

import numpy as np
from scipy.spatial import ConvexHull

from tembed.core.errors import EmbeddingError
from tembed.core.models import Color, DiagnosticsReport
from tembed.embedding.tembedding import TEmbedding

logger = logging.getLogger(__name__)

ETA_TOL = 1e-9
CLOSURE_TOL = 1e-10  # relative to edge length


@dataclass
class OrigamiField:
    """η per face, the sign of η̄_bη̄_w·|dT|/dT per G-edge and branch flags per vertex."""
    eta: np.ndarray
    edge_signs: Dict[int, int]
    branch: Dict[int, bool]
    base_face: int
    colors: List[Color] = field(default_factory=list, repr=False)

    @property
    def eta2(self) -> np.ndarray:
        return self.eta ** 2

    @property
    def phi(self) -> np.ndarray:
        """arg η mod π, in (−π/2, π/2]."""
        phi = np.angle(self.eta2) / 2
        return np.where(phi <= -np.pi / 2 + 1e-15, phi + np.pi, phi)

    def rotated(self, alpha: complex) -> "OrigamiField":
        """Global phase action: η_w → αη_w and η_b → ᾱη_b."""
        alpha = complex(alpha) / abs(alpha)
        factors = np.array([alpha if c is Color.WHITE else np.conj(alpha) for c in self.colors])
        return replace(self, eta=self.eta * factors)

    def to_dict(self, te: TEmbedding) -> dict:
        return {
            "eta": {f.id: [float(z.real), float(z.imag)] for f, z in zip(te.faces, self.eta)},
            "branch_vertices": [te.vertex_ids[v] for v, b in sorted(self.branch.items()) if b],
            "normalization": f"eta({te.faces[self.base_face].id}) = 1",
        }


@dataclass
class OrigamiMap:
    """O on the vertices of T, with O(base) = 0."""
    values: np.ndarray
    base: int
    max_closure: float = 0.0

    def rotated(self, alpha: complex) -> "OrigamiMap":
        alpha = complex(alpha) / abs(alpha)
        return replace(self, values=self.values * alpha ** 2)

    def to_dict(self, te: TEmbedding) -> dict:
        return {
            "base": te.vertex_ids[self.base],
            "max_closure": self.max_closure,
            "values": {vid: [float(z.real), float(z.imag)] for vid, z in zip(te.vertex_ids, self.values)},
        }


def compute_eta(te: TEmbedding, base_face: Optional[int] = None) -> OrigamiField:
    """Solve η̄_b η̄_w = dT/|dT| along a BFS tree and record signs on all edges.

    Args:
        te: Validated t-embedding
        base_face: Face where η = 1; defaults to the lowest-index white face

    Raises:
        EmbeddingError: if some edge relation holds for neither sign
    """
    if base_face is None:
        base_face = te.white[0] if te.white else 0
    n = len(te.faces)
    eta = np.full(n, np.nan + 0j, dtype=complex)
    eta[base_face] = 1.0
    adjacency: Dict[int, List] = {i: [] for i in range(n)}
    for e in te.g_edges:
        d = te.dT(e) / abs(te.dT(e))
        adjacency[e.b].append((e.w, d, e.index))
        adjacency[e.w].append((e.b, d, e.index))

    queue = deque([base_face])
    while queue:
        f = queue.popleft()
        for g, d, _ in adjacency[f]:
            if np.isnan(eta[g]):
                eta[g] = np.conj(d * eta[f])
                queue.append(g)
    if np.any(np.isnan(eta)):
        raise EmbeddingError("disconnected", "faces unreachable when propagating eta", te.faces[base_face].id)
    return origami_field(te, eta, base_face)


def origami_field(te: TEmbedding, eta: np.ndarray, base_face: int = 0) -> OrigamiField:
    """Wrap given unit values η per face, recording edge signs and branch flags.

    Lattice builders use this to install a canonical choice of signs.

    Raises:
        EmbeddingError: if η̄_bη̄_w ≠ ±dT/|dT| on some edge
    """
    eta = np.asarray(eta, dtype=complex)
    edge_signs: Dict[int, int] = {}
    for e in te.g_edges:
        d = te.dT(e) / abs(te.dT(e))
        rho = np.conj(eta[e.b]) * np.conj(eta[e.w]) / d
        if abs(rho - 1) < ETA_TOL:
            edge_signs[e.index] = 1
        elif abs(rho + 1) < ETA_TOL:
            edge_signs[e.index] = -1
        else:
            raise EmbeddingError(
                "eta_inconsistent", f"eta^2 is not single-valued across edge {e.index} (ratio {rho:.6f})",
                te.faces[e.b].id, float(abs(np.angle(rho ** 2))),
            )

    branch: Dict[int, bool] = {}
    for v in te.interior_vertices:
        star, closed = te.vertex_star(v)
        if not closed:
            continue
        sign = 1
        for j in range(len(star)):
            f, g = star[j], star[(j + 1) % len(star)]
            b, w = (f, g) if te.faces[f].color is Color.BLACK else (g, f)
            e = te.edge_between.get((b, w))
            if e is not None:
                sign *= edge_signs[e.index]
        branch[v] = sign < 0

    colors = [f.color for f in te.faces]
    logger.info(f"Origami square root on {te.name}: {sum(branch.values())} branch vertices")
    return OrigamiField(eta, edge_signs, branch, base_face, colors)


def origami_increment(te: TEmbedding, eta: OrigamiField, face: int, u: int, v: int) -> complex:
    """dO along the side u -> v computed from the given face."""
    dz = te.positions[v] - te.positions[u]
    if te.faces[face].color is Color.WHITE:
        return complex(eta.eta2[face] * dz)
    return complex(np.conj(eta.eta2[face]) * np.conj(dz))


def compute_origami(te: TEmbedding, eta: OrigamiField, base: int = 0) -> OrigamiMap:
    """Integrate dO from O(base) = 0 and verify closure on every edge from both sides.

    Raises:
        EmbeddingError: if the white-side and black-side increments disagree
    """
    n = te.n_vertices
    values = np.full(n, np.nan + 0j, dtype=complex)
    values[base] = 0.0
    steps: Dict[int, List] = {i: [] for i in range(n)}
    for (u, v), f in te.half_edges.items():
        dO = origami_increment(te, eta, f, u, v)
        steps[u].append((v, dO))
        steps[v].append((u, -dO))

    queue = deque([base])
    while queue:
        u = queue.popleft()
        for v, dO in steps[u]:
            if np.isnan(values[v]):
                values[v] = values[u] + dO
                queue.append(v)

    worst = 0.0
    where = None
    for (u, v), f in te.half_edges.items():
        if np.isnan(values[u]) or np.isnan(values[v]):
            continue
        length = abs(te.positions[v] - te.positions[u])
        r = abs(values[v] - values[u] - origami_increment(te, eta, f, u, v)) / max(length, 1e-300)
        if r > worst:
            worst, where = r, te.vertex_ids[u]
    if worst > CLOSURE_TOL:
        raise EmbeddingError("origami_closure", f"dO is not closed (relative residual {worst:.3e})", where, worst)
    logger.info(f"Origami map on {te.name}: closure residual {worst:.3e}")
    return OrigamiMap(values, base, worst)


def check_phi_increments(te: TEmbedding, eta: OrigamiField) -> DiagnosticsReport:
    """Check φ_{b2} − φ_{b1} ≡ −θ(w, v) mod π for consecutive b1, w, b2 around interior vertices."""
    report = DiagnosticsReport(subject=f"phi increments on {te.name}")
    phi = eta.phi
    worst = 0.0
    for v in te.interior_vertices:
        star, closed = te.vertex_star(v)
        if not closed:
            continue
        n = len(star)
        for j in range(n):
            w = star[j]
            if te.faces[w].color is not Color.WHITE:
                continue
            b1, b2 = star[j - 1], star[(j + 1) % n]
            diff = phi[b2] - phi[b1] + te.sector_angle(w, v)
            r = abs((diff + np.pi / 2) % np.pi - np.pi / 2)
            worst = max(worst, r)
            if r > 1e-10:
                report.add("phi_increment", te.vertex_ids[v], f"phi increment off by {r:.3e}", value=float(r))
    report.metrics["max_residual"] = worst
    return report


def origami_image_diameter(om: OrigamiMap) -> float:
    z = om.values[~np.isnan(om.values)]
    if len(z) == 0:
        return 0.0
    z = np.unique(np.round(z, 12))
    if len(z) > 2000:
        hull = ConvexHull(np.column_stack([z.real, z.imag]))
        z = z[hull.vertices]
    return float(np.max(np.abs(z[:, None] - z[None, :])))
