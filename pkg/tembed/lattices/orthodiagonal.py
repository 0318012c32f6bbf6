"""Orthodiagonal embeddings and their medial t-embeddings.

Λ = Γ ∪ Γ* is given by positions, a primal flag per vertex and quads
(q0, q1, q2, q3) listed counterclockwise with q0, q2 ∈ Γ and q1, q3 ∈ Γ*.
The diagonals p0p1 = q0q2 and d0d1 = q1q3 must be orthogonal. The
medial t-embedding has a vertex at the midpoint of every edge of Λ, a
white Varignon rectangle per quad and a black face per vertex of Λ.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree

from tembed.core.errors import LatticeError
from tembed.core.models import Color, DiagnosticsReport, Flavor, Mode
from tembed.embedding.origami import compute_eta
from tembed.embedding.tembedding import TEmbedding, TFace
from tembed.lattices.base import LatticeBuilder, LatticeBundle
from tembed.walks.rates import walk_rates
from tembed.walks.tgraph import build_tgraph, tgraph_map

logger = logging.getLogger(__name__)

ORTHOGONALITY_TOL = 1e-10
IDENTITY_TOL = 1e-10

Quad = Tuple[int, int, int, int]


@dataclass
class OrthodiagonalData:
    """Λ with conductances, weights and the medial t-embedding indices."""
    positions: np.ndarray
    is_primal: np.ndarray
    quads: List[Quad]
    conductance: np.ndarray  # c of the primal diagonal q0q2, per quad
    crossing: np.ndarray  # intersection of the diagonals, per quad
    mu_quad: np.ndarray  # ½|d1 − d0||p1 − p0|
    mu_vertex: np.ndarray  # ¼Σ|q_{j−1} − q_{j+1}||w − q_j|, per Λ vertex
    vertex_quads: Dict[int, List[Tuple[int, int]]] = field(default_factory=dict)  # x -> [(quad, j)]
    interior: List[int] = field(default_factory=list)
    edge_vertex: Dict[Tuple[int, int], int] = field(default_factory=dict)  # sorted Λ-edge -> vertex of T
    black_face: Dict[int, int] = field(default_factory=dict)  # Λ vertex -> face of T
    white_face: List[int] = field(default_factory=list)  # quad -> face of T

    def diagonal_conductance(self, quad: int, x: int) -> float:
        """Conductance of the diagonal of a quad through its corner x."""
        return float(self.conductance[quad] if self.is_primal[x] else 1.0 / self.conductance[quad])

    def to_dict(self) -> dict:
        return {
            "n_lambda": int(len(self.positions)),
            "n_primal": int(self.is_primal.sum()),
            "n_quads": len(self.quads),
            "conductance_range": [float(self.conductance.min()), float(self.conductance.max())]
            if len(self.quads) else None,
            "n_interior": len(self.interior),
        }


def _normalize_quad(quad: Sequence[int], is_primal: np.ndarray, z: np.ndarray, k: int) -> Quad:
    quad = tuple(int(v) for v in quad)
    if len(quad) != 4:
        raise LatticeError("bad_quad", f"quad {k} has {len(quad)} vertices", str(k))
    if not is_primal[quad[0]]:
        quad = quad[1:] + quad[:1]
    if not (is_primal[quad[0]] and is_primal[quad[2]] and not is_primal[quad[1]] and not is_primal[quad[3]]):
        raise LatticeError("bad_quad", f"quad {k} does not alternate between Γ and Γ*", str(k))
    pts = z[list(quad)]
    area = 0.5 * float(np.sum((np.conj(pts) * np.roll(pts, -1)).imag))
    if area <= 0:
        raise LatticeError("orientation", f"quad {k} is not counterclockwise", str(k), area)
    return quad


def _crossing(p0: complex, p1: complex, d0: complex, d1: complex) -> complex:
    """Intersection of the lines p0p1 and d0d1."""
    u, v = p1 - p0, d1 - d0
    A = np.array([[u.real, -v.real], [u.imag, -v.imag]])
    b = np.array([(d0 - p0).real, (d0 - p0).imag])
    s, _ = np.linalg.solve(A, b)
    return complex(p0 + s * u)


def orthodiagonal_data(positions: Sequence[complex], is_primal: Sequence[bool],
                       quads: Sequence[Sequence[int]]) -> OrthodiagonalData:
    """Check orthodiagonality and compute conductances and weights.

    Raises:
        LatticeError: if a quad does not alternate, is clockwise, or has
            diagonals that are not orthogonal
    """
    z = np.asarray(positions, dtype=complex)
    primal = np.asarray(is_primal, dtype=bool)
    norm = [_normalize_quad(q, primal, z, k) for k, q in enumerate(quads)]
    nq = len(norm)
    conductance = np.empty(nq)
    crossing = np.empty(nq, dtype=complex)
    mu_quad = np.empty(nq)
    mu_vertex = np.zeros(len(z))
    vertex_quads: Dict[int, List[Tuple[int, int]]] = {}
    edge_count: Dict[Tuple[int, int], int] = {}
    for k, quad in enumerate(norm):
        p0, d0, p1, d1 = z[list(quad)]
        dp, dd = p1 - p0, d1 - d0
        dot = float(np.real(dp * np.conj(dd)))
        if abs(dot) > ORTHOGONALITY_TOL * abs(dp) * abs(dd):
            raise LatticeError("not_orthodiagonal", f"diagonals of quad {k} are not orthogonal "
                                                    f"(cosine {dot / (abs(dp) * abs(dd)):.3e})", str(k), dot)
        conductance[k] = abs(dd) / abs(dp)
        crossing[k] = _crossing(p0, p1, d0, d1)
        mu_quad[k] = 0.5 * abs(dd) * abs(dp)
        for j, x in enumerate(quad):
            vertex_quads.setdefault(x, []).append((k, j))
            other = abs(z[quad[(j - 1) % 4]] - z[quad[(j + 1) % 4]])
            mu_vertex[x] += 0.25 * other * abs(crossing[k] - z[x])
            key = tuple(sorted((x, quad[(j + 1) % 4])))
            edge_count[key] = edge_count.get(key, 0) + 1
    boundary = {v for key, n in edge_count.items() if n == 1 for v in key}
    interior = sorted(x for x in vertex_quads if x not in boundary)
    logger.info(f"Orthodiagonal Λ: {len(z)} vertices, {nq} quads, {len(interior)} interior, "
                f"conductances in [{conductance.min() if nq else 0:.4g}, {conductance.max() if nq else 0:.4g}]")
    return OrthodiagonalData(z, primal, norm, conductance, crossing, mu_quad, mu_vertex, vertex_quads, interior)


def _star_cycle(z: np.ndarray, x: int, neighbors: List[int]) -> List[int]:
    """Neighbors of x sorted counterclockwise, starting after the widest angular gap."""
    angles = np.angle(z[neighbors] - z[x])
    order = list(np.argsort(angles))
    a = angles[order]
    gaps = np.diff(np.append(a, a[0] + 2 * np.pi))
    start = (int(np.argmax(gaps)) + 1) % len(order)
    order = order[start:] + order[:start]
    return [neighbors[i] for i in order]


def _convex_ccw(pts: np.ndarray) -> bool:
    d_in = pts - np.roll(pts, 1)
    d_out = np.roll(pts, -1) - pts
    return bool(np.all((np.conj(d_in) * d_out).imag > 0))


def from_orthodiagonal(positions: Sequence[complex], is_primal: Sequence[bool], quads: Sequence[Sequence[int]],
                       name: str = "orthodiagonal", mode: Mode = Mode.FINITE,
                       labels: Optional[Sequence[str]] = None) -> Tuple[TEmbedding, OrthodiagonalData]:
    """Medial t-embedding of an orthodiagonal embedding.

    Interior vertices of Λ always get a black face; boundary vertices get
    one when their incident edge midpoints form a convex polygon.

    Raises:
        LatticeError: if the diagonals of some quad are not orthogonal
    """
    data = orthodiagonal_data(positions, is_primal, quads)
    z = data.positions
    labels = list(labels) if labels is not None else [f"x{k}" for k in range(len(z))]
    mid_positions: List[complex] = []
    ids: List[str] = []

    def midpoint(a: int, b: int) -> int:
        key = (min(a, b), max(a, b))
        if key not in data.edge_vertex:
            data.edge_vertex[key] = len(mid_positions)
            mid_positions.append(0.5 * (z[a] + z[b]))
            ids.append(f"m[{labels[key[0]]}|{labels[key[1]]}]")
        return data.edge_vertex[key]

    faces: List[TFace] = []
    neighbors: Dict[int, List[int]] = {}
    for k, quad in enumerate(data.quads):
        cycle = tuple(midpoint(quad[j], quad[(j + 1) % 4]) for j in range(4))
        data.white_face.append(len(faces))
        faces.append(TFace(f"q{k}", Color.WHITE, cycle))
        for j in range(4):
            a, b = quad[j], quad[(j + 1) % 4]
            for x, y in ((a, b), (b, a)):
                if y not in neighbors.setdefault(x, []):
                    neighbors[x].append(y)

    interior = set(data.interior)
    mids = np.array(mid_positions, dtype=complex)
    for x in sorted(neighbors):
        if len(neighbors[x]) < 3:
            continue
        cycle = tuple(data.edge_vertex[(min(x, y), max(x, y))] for y in _star_cycle(z, x, neighbors[x]))
        if x not in interior and not _convex_ccw(mids[list(cycle)]):
            logger.debug(f"Skipping non-convex boundary face around {labels[x]}")
            continue
        data.black_face[x] = len(faces)
        faces.append(TFace(labels[x], Color.BLACK, cycle))

    te = TEmbedding(mids, faces, ids, mode, name, {"lattice": "orthodiagonal"})
    logger.info(f"Medial t-embedding {name}: {len(data.white_face)} white rectangles, "
                f"{len(data.black_face)} black faces")
    return te, data


@dataclass
class OrthoOperators:
    """∂, ∂̄ per quad and Δ, 4∂*∂ per Λ vertex (NaN off the interior)."""
    d: np.ndarray
    dbar: np.ndarray
    laplacian: np.ndarray
    dstar_d: np.ndarray
    factorization_residual: float

    def to_dict(self) -> dict:
        return {
            "max_abs_dbar": float(np.nanmax(np.abs(self.dbar))) if len(self.dbar) else 0.0,
            "factorization_residual": self.factorization_residual,
        }


def _check_lambda_field(data: OrthodiagonalData, values) -> np.ndarray:
    values = np.asarray(values, dtype=complex)
    if values.shape != (len(data.positions),):
        raise LatticeError("domain_mismatch", f"field has shape {values.shape}; expected one value per "
                                              f"vertex of Λ ({len(data.positions)})")
    return values


def d_star(data: OrthodiagonalData, G) -> np.ndarray:
    """∂*G(x) = (i/4μ(x)) Σ (q_{j−1} − q_{j+1}) G(quad) over the quads at x = q_j.

    Raises:
        LatticeError: if G does not have one value per quad
    """
    G = np.asarray(G, dtype=complex)
    if G.shape != (len(data.quads),):
        raise LatticeError("domain_mismatch", f"field has shape {G.shape}; expected one value per quad "
                                              f"({len(data.quads)})")
    z = data.positions
    out = np.full(len(z), np.nan + 0j, dtype=complex)
    for x in data.interior:
        total = 0j
        for k, j in data.vertex_quads[x]:
            quad = data.quads[k]
            total += (z[quad[(j - 1) % 4]] - z[quad[(j + 1) % 4]]) * G[k]
        out[x] = 1j * total / (4 * data.mu_vertex[x])
    return out


def ortho_operators(data: OrthodiagonalData, values) -> OrthoOperators:
    """∂, ∂̄ and the cotangent Laplacian of a field on Λ, with the check −Δ = 4∂*∂.

    Raises:
        LatticeError: if the field does not have one value per vertex of Λ
    """
    H = _check_lambda_field(data, values)
    z = data.positions
    nq = len(data.quads)
    d = np.empty(nq, dtype=complex)
    dbar = np.empty(nq, dtype=complex)
    for k, (p0, d0, p1, d1) in enumerate(data.quads):
        dp, dd = z[p1] - z[p0], z[d1] - z[d0]
        hp, hd = H[p1] - H[p0], H[d1] - H[d0]
        d[k] = 0.5 * (hp / dp + hd / dd)
        dbar[k] = 0.5 * (hp / np.conj(dp) + hd / np.conj(dd))

    laplacian = np.full(len(z), np.nan + 0j, dtype=complex)
    for x in data.interior:
        total = 0j
        for k, j in data.vertex_quads[x]:
            opposite = data.quads[k][(j + 2) % 4]
            total += data.diagonal_conductance(k, x) * (H[opposite] - H[x])
        laplacian[x] = total / (2 * data.mu_vertex[x])

    dsd = d_star(data, d)
    residual = 0.0
    if data.interior:
        idx = np.array(data.interior)
        scale = max(float(np.max(np.abs(H))), 1.0)
        residual = float(np.max(np.abs(-laplacian[idx] - 4 * dsd[idx]))) / scale
    logger.debug(f"Orthodiagonal operators: factorization residual {residual:.3e}")
    return OrthoOperators(d, dbar, laplacian, dsd, residual)


def check_gauge(te: TEmbedding, data: OrthodiagonalData) -> DiagnosticsReport:
    """|dT| = χ·½|p1 − p0| with χ = c on Γ faces and χ = 1 on Γ* faces."""
    report = DiagnosticsReport(subject=f"orthodiagonal gauge on {te.name}")
    face_vertex = {f: x for x, f in data.black_face.items()}
    quad_of = {f: k for k, f in enumerate(data.white_face)}
    z = data.positions
    worst = 0.0
    for e in te.g_edges:
        x, k = face_vertex[e.b], quad_of[e.w]
        p0, _, p1, _ = data.quads[k]
        chi = data.conductance[k] if data.is_primal[x] else 1.0
        expected = chi * 0.5 * abs(z[p1] - z[p0])
        r = abs(abs(te.dT(e)) - expected) / expected
        worst = max(worst, r)
        if r > IDENTITY_TOL:
            report.add("gauge", te.faces[e.b].id, f"|dT| differs from the conductance gauge by {r:.3e}", value=r)
    report.metrics["max_residual"] = worst
    return report


def check_eta_values(bundle: LatticeBundle) -> DiagnosticsReport:
    """η = ±1 on Γ faces and ±i on Γ* faces."""
    data: OrthodiagonalData = bundle.data
    report = DiagnosticsReport(subject=f"orthodiagonal eta on {bundle.te.name}")
    worst = 0.0
    for x, f in data.black_face.items():
        eta = bundle.eta.eta[f]
        r = abs(eta.imag) if data.is_primal[x] else abs(eta.real)
        worst = max(worst, r)
        if r > IDENTITY_TOL:
            report.add("eta_value", bundle.te.faces[f].id, f"eta = {eta:.6f} is off its axis", value=float(r))
    report.metrics["max_residual"] = worst
    return report


def _vertex_set_residual(bundle: LatticeBundle, alpha: complex, primal: bool) -> float:
    """Largest |image(m) − x − τ| over midpoints m of edges xy, x on the chosen side of Λ."""
    data: OrthodiagonalData = bundle.data
    images = tgraph_map(bundle.te, bundle.om, alpha, Flavor.WHITE_FLAT)
    z = data.positions
    diffs = []
    for (a, b), m in data.edge_vertex.items():
        x = a if data.is_primal[a] == primal else b
        diffs.append(images[m] - z[x])
    diffs = np.array(diffs)
    tau = diffs[0]
    return float(np.max(np.abs(diffs - tau)))


def check_tgraph_vertex_sets(bundle: LatticeBundle) -> DiagnosticsReport:
    """T + Ō sends every midpoint to its Γ* endpoint and T − Ō to its Γ endpoint, up to translation."""
    report = DiagnosticsReport(subject=f"orthodiagonal T-graphs on {bundle.te.name}")
    plus = _vertex_set_residual(bundle, 1.0, primal=False)
    minus = _vertex_set_residual(bundle, 1j, primal=True)
    scale = max(bundle.te.diameter, 1.0)
    for label, r in (("T+conj(O)", plus), ("T-conj(O)", minus)):
        if r > 1e-12 * scale:
            report.add("vertex_set", label, f"{label} misses the lattice by {r:.3e}", value=r)
    report.metrics["plus_residual"] = plus
    report.metrics["minus_residual"] = minus
    return report


def rectangle_projection_residual(bundle: LatticeBundle, alpha: complex = 1.0) -> float:
    """Spread of Pr((T + α²O)(b), iαℝ) − Pr(b, iαℝ) over the vertices of all Γ faces."""
    data: OrthodiagonalData = bundle.data
    alpha = complex(alpha) / abs(alpha)
    images = tgraph_map(bundle.te, bundle.om, alpha, Flavor.BLACK_FLAT)
    axis = 1j * alpha
    offsets = []
    for x, f in data.black_face.items():
        if not data.is_primal[x]:
            continue
        base = np.real(np.conj(axis) * data.positions[x])
        for v in bundle.te.faces[f].cycle:
            offsets.append(np.real(np.conj(axis) * images[v]) - base)
    if not offsets:
        return 0.0
    return float(np.max(offsets) - np.min(offsets))


def check_harmonic_equivalence(bundle: LatticeBundle) -> DiagnosticsReport:
    """Long-jump rates of T + Ō between Γ* points are proportional to the dual conductances 1/c."""
    data: OrthodiagonalData = bundle.data
    te = bundle.te
    report = DiagnosticsReport(subject=f"orthodiagonal harmonic equivalence on {te.name}")
    tg = build_tgraph(te, bundle.eta, bundle.om, 1.0, Flavor.WHITE_FLAT)
    wr = walk_rates(tg)
    dual = [x for x in range(len(data.positions)) if not data.is_primal[x] and x in data.vertex_quads]
    images = tgraph_map(te, bundle.om, 1.0, Flavor.WHITE_FLAT)
    (a, b), m = next(iter(data.edge_vertex.items()))
    tau = images[m] - data.positions[b if data.is_primal[a] else a]
    tree = cKDTree(np.column_stack([data.positions[dual].real, data.positions[dual].imag]))
    tol = 1e-9 * max(te.diameter, 1.0)

    def lattice_vertex(p: int) -> int:
        w = tg.points[p] - tau
        dist, i = tree.query([w.real, w.imag])
        if dist > tol:
            raise LatticeError("vertex_set", f"T-graph point {p} is not a Γ* vertex", str(p), float(dist))
        return dual[int(i)]

    quad_of_pair = {frozenset((q[1], q[3])): k for k, q in enumerate(data.quads)}
    worst = 0.0
    n_checked = 0
    for p in tg.degenerate:
        if p in tg.sinks:
            continue
        d = lattice_vertex(p)
        ratios = []
        for t, rate in zip(wr.chain.targets[p], wr.chain.rates[p]):
            k = quad_of_pair.get(frozenset((d, lattice_vertex(int(t)))))
            if k is None:
                report.add("jump", te.vertex_ids[tg.members[p][0]], "long jump between non-adjacent Γ* points")
                continue
            ratios.append(rate * data.conductance[k])
        if len(ratios) < 2:
            continue
        spread = (max(ratios) - min(ratios)) / max(ratios)
        worst = max(worst, spread)
        n_checked += 1
        if spread > 1e-9:
            report.add("rate_ratio", te.vertex_ids[tg.members[p][0]],
                       f"rates are not proportional to dual conductances (spread {spread:.3e})", value=spread)
    report.metrics["max_spread"] = worst
    report.metrics["n_points"] = float(n_checked)
    return report


class OrthodiagonalGrid(LatticeBuilder):
    """Rectangular grid Γ with Γ* at the cell centers.

    Spacings are δ, or δ·U(1 − spread, 1 + spread) when a seed is given;
    uneven spacings give non-trivial conductances.
    """

    def __init__(self, size: int, delta: float = 1.0, mode: Mode = Mode.FINITE,
                 seed: Optional[int] = None, spread: float = 0.4):
        super().__init__(size, delta, mode)
        self.seed = seed
        if seed is None:
            steps = np.full((2, size), delta)
        else:
            steps = delta * np.random.default_rng(seed).uniform(1 - spread, 1 + spread, size=(2, size))
        self.xs = np.concatenate([[0.0], np.cumsum(steps[0])])
        self.ys = np.concatenate([[0.0], np.cumsum(steps[1])])

    @property
    def kind(self) -> str:
        return "orthodiagonal"

    @property
    def framework(self) -> str:
        return "orthodiagonal"

    def lattice(self) -> Tuple[np.ndarray, np.ndarray, List[Quad], List[str]]:
        n = self.size
        xs, ys = self.xs, self.ys
        positions: List[complex] = []
        primal: List[bool] = []
        labels: List[str] = []
        P: Dict[Tuple[int, int], int] = {}
        D: Dict[Tuple[int, int], int] = {}
        for l in range(n + 1):
            for k in range(n + 1):
                P[(k, l)] = len(positions)
                positions.append(complex(xs[k], ys[l]))
                primal.append(True)
                labels.append(f"g{k}_{l}")
        for l in range(n):
            for k in range(n):
                D[(k, l)] = len(positions)
                positions.append(complex(0.5 * (xs[k] + xs[k + 1]), 0.5 * (ys[l] + ys[l + 1])))
                primal.append(False)
                labels.append(f"c{k}_{l}")
        quads: List[Quad] = []
        for l in range(1, n):
            for k in range(n):
                quads.append((P[(k, l)], D[(k, l - 1)], P[(k + 1, l)], D[(k, l)]))
        for l in range(n):
            for k in range(1, n):
                quads.append((P[(k, l)], D[(k, l)], P[(k, l + 1)], D[(k - 1, l)]))
        return np.array(positions), np.array(primal), quads, labels

    def tembedding(self) -> TEmbedding:
        positions, primal, quads, labels = self.lattice()
        te, self.data = from_orthodiagonal(positions, primal, quads, f"orthodiagonal-{self.size}", self.mode, labels)
        return te

    def canonical_eta(self, te: TEmbedding) -> np.ndarray:
        b0 = next(f for x, f in sorted(self.data.black_face.items()) if self.data.is_primal[x])
        eta = compute_eta(te)
        return eta.rotated(eta.eta[b0]).eta

    def decorate(self, bundle: LatticeBundle) -> None:
        bundle.data = self.data
        bundle.meta["seed"] = self.seed
        bundle.meta["gauge_residual"] = check_gauge(bundle.te, self.data).metrics["max_residual"]
