"""s-embeddings of the square-grid Ising model.

Λ is the (n+1) × (m+1) grid of vertices (i, j); Ising vertices (Γ) have
i + j even and dual vertices (Γ*) odd. Every quad (i, j) is one Ising
edge with angle θ ∈ (0, π/2). Corners are the edges of Λ: H(i, j) joins
(i, j) to (i+1, j) and V(i, j) joins (i, j) to (i, j+1).

The Dirac spinor 𝒳 lives on the double cover of the corners. One sheet
is stored: going around a quad through B = H(i, j), L = V(i, j),
U = H(i, j+1), R = V(i+1, j) stays on the sheet except between R and B,
where it crosses. With this rule the propagation equation

    𝒳(c) = 𝒳(c′)cos θ + 𝒳(c″)sin θ,

c′ sharing the Ising vertex of c and c″ its dual vertex, holds on every
quad, and both the quads and the interior vertices carry holonomy −1.
"""
import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from tembed.core.errors import LatticeError
from tembed.core.models import Color, DiagnosticsReport, Mode
from tembed.embedding.tembedding import TEmbedding, TFace
from tembed.holomorphy.functions import THoloFunction
from tembed.lattices.base import LatticeBuilder, LatticeBundle
from tembed.lattices.orthodiagonal import ortho_operators, orthodiagonal_data

logger = logging.getLogger(__name__)

DEFAULT_SIGMA = np.exp(1j * np.pi / 4)
PROPAGATION_TOL = 1e-9
TANGENCY_TOL = 1e-9
GAUGE_TOL = 1e-10

Quad = Tuple[int, int, int, int]


@dataclass
class SEmbeddingData:
    """Spinor, positions 𝒮 and 𝒬 on Λ, and the corner-to-face maps of T."""
    n: int
    m: int
    theta: np.ndarray  # (n, m)
    sigma: complex
    positions: np.ndarray  # 𝒮 per Λ vertex, index j(n+1) + i
    is_primal: np.ndarray
    corners: List[Tuple[int, int]]  # (Ising vertex, dual vertex)
    X: np.ndarray  # per corner, on the stored sheet
    Q: np.ndarray  # per Λ vertex
    quads: List[Quad]  # (i, j), (i+1, j), (i+1, j+1), (i, j+1)
    quad_corners: List[Quad]  # (B, L, U, R)
    primal_pairs: List[Tuple[bool, bool, bool, bool]]  # pairs (B,L), (L,U), (U,R), (R,B) meet at Γ
    incenters: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=complex))
    corner_black: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=int))  # face b(c) or −1
    corner_white: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=int))  # face w(c) or −1
    residuals: Dict[str, float] = field(default_factory=dict)

    @property
    def n_lambda(self) -> int:
        return len(self.positions)

    def quad_theta(self, k: int) -> float:
        return float(self.theta[k % self.n, k // self.n])

    def to_dict(self) -> dict:
        return {
            "grid": [self.n, self.m],
            "sigma": [float(self.sigma.real), float(self.sigma.imag)],
            "theta_range": [float(self.theta.min()), float(self.theta.max())],
            "residuals": dict(self.residuals),
        }


def vertex_index(n: int, i: int, j: int) -> int:
    return j * (n + 1) + i


def _corner_index(n: int, m: int):
    def h(i: int, j: int) -> int:
        return j * n + i

    def v(i: int, j: int) -> int:
        return n * (m + 1) + j * (n + 1) + i
    return h, v


def grid_corners(n: int, m: int) -> Tuple[List[Tuple[int, int]], List[Quad], List[Quad], List[Tuple[bool, ...]]]:
    """Corners as (Ising vertex, dual vertex), quads, their (B, L, U, R) corners and primal pairs."""
    h, v = _corner_index(n, m)
    corners: List[Tuple[int, int]] = [(-1, -1)] * (n * (m + 1) + (n + 1) * m)

    def orient(a: Tuple[int, int], b: Tuple[int, int]) -> Tuple[int, int]:
        ia, ib = vertex_index(n, *a), vertex_index(n, *b)
        return (ia, ib) if sum(a) % 2 == 0 else (ib, ia)

    for j in range(m + 1):
        for i in range(n):
            corners[h(i, j)] = orient((i, j), (i + 1, j))
    for j in range(m):
        for i in range(n + 1):
            corners[v(i, j)] = orient((i, j), (i, j + 1))
    quads: List[Quad] = []
    quad_corners: List[Quad] = []
    pairs: List[Tuple[bool, ...]] = []
    for j in range(m):
        for i in range(n):
            quads.append((vertex_index(n, i, j), vertex_index(n, i + 1, j),
                          vertex_index(n, i + 1, j + 1), vertex_index(n, i, j + 1)))
            quad_corners.append((h(i, j), v(i, j), h(i, j + 1), v(i + 1, j)))
            pairs.append(((i + j) % 2 == 0, (i + j + 1) % 2 == 0, (i + j) % 2 == 0, (i + j + 1) % 2 == 0))
    return corners, quads, quad_corners, pairs


def _weights(theta: float, pairs: Sequence[bool]) -> List[float]:
    c, s = np.cos(theta), np.sin(theta)
    return [c if p else s for p in pairs]


def propagate_quad(b: complex, l: complex, theta: float, pairs: Sequence[bool]) -> Tuple[complex, complex]:
    """(U, R) of a quad from its B and L values."""
    w0, w1, _, w3 = _weights(theta, pairs)
    return (l - b * w0) / w1, (l * w0 - b) / w3


def propagation_residuals(data: SEmbeddingData, values: np.ndarray,
                          quads: Optional[Sequence[int]] = None) -> np.ndarray:
    """|𝒳(c) − 𝒳(c′)cos θ − 𝒳(c″)sin θ| maximized over the four corners of each quad."""
    values = np.asarray(values, dtype=complex)
    ks = range(len(data.quads)) if quads is None else quads
    out = []
    for k in ks:
        b, l, u, r = values[list(data.quad_corners[k])]
        w0, w1, w2, w3 = _weights(data.quad_theta(k), data.primal_pairs[k])
        eqs = (b - (w0 * l - w3 * r), l - (w0 * b + w1 * u), u - (w1 * l + w2 * r), r - (w2 * u - w3 * b))
        out.append(max(abs(e) for e in eqs))
    return np.array(out)


def rhombic_target(n: int, m: int, theta: float, delta: float = 1.0) -> np.ndarray:
    """Critical rhombic positions δ(i + j·e^{2iθ}) used to pick seed signs."""
    step = np.exp(2j * theta)
    return np.array([delta * (i + j * step) for j in range(m + 1) for i in range(n + 1)])


def propagate_spinor(n: int, m: int, theta: np.ndarray, corners: List[Tuple[int, int]],
                     quad_corners: List[Quad], pairs: List[Tuple[bool, ...]],
                     bottom: Optional[Sequence[complex]] = None, left: Optional[Sequence[complex]] = None,
                     target: Optional[np.ndarray] = None) -> np.ndarray:
    """Sweep the quads row by row from the bottom row H(i, 0) and left column V(0, j).

    Missing seeds are square roots of the target increments, with the sign
    that makes the next propagated values best match the target.
    """
    h, v = _corner_index(n, m)
    X = np.full(len(corners), np.nan + 0j, dtype=complex)
    if bottom is not None:
        X[[h(i, 0) for i in range(n)]] = np.asarray(bottom, dtype=complex)
    if left is not None:
        X[[v(0, j) for j in range(m)]] = np.asarray(left, dtype=complex)

    def wanted(c: int) -> complex:
        a, b = corners[c]
        return complex(target[a] - target[b])

    if np.isnan(X[h(0, 0)]):
        X[h(0, 0)] = np.sqrt(wanted(h(0, 0)))
    for j in range(m):
        for i in range(n):
            k = j * n + i
            cb, cl, cu, cr = quad_corners[k]
            free = [c for c in (cb, cl) if np.isnan(X[c])]
            if free:
                c = free[0]
                root = np.sqrt(wanted(c))
                best = None
                for sign in (1, -1):
                    X[c] = sign * root
                    u, r = propagate_quad(X[cb], X[cl], theta[i, j], pairs[k])
                    err = abs(u * u - wanted(cu)) + abs(r * r - wanted(cr))
                    if best is None or err < best[0]:
                        best = (err, sign)
                X[c] = best[1] * root
            X[cu], X[cr] = propagate_quad(X[cb], X[cl], theta[i, j], pairs[k])
    return X


def integrate_corners(n_vertices: int, corners: List[Tuple[int, int]], increments: np.ndarray,
                      base: int = 0) -> Tuple[np.ndarray, float]:
    """Primitive with f(v•) − f(v°) = increment(c) and its largest closure defect."""
    steps: Dict[int, List[Tuple[int, complex]]] = {}
    for (a, b), d in zip(corners, increments):
        steps.setdefault(a, []).append((b, -d))
        steps.setdefault(b, []).append((a, d))
    values = np.full(n_vertices, np.nan + 0j, dtype=complex)
    values[base] = 0.0
    queue = deque([base])
    while queue:
        x = queue.popleft()
        for y, d in steps.get(x, ()):
            if np.isnan(values[y]):
                values[y] = values[x] + d
                queue.append(y)
    closure = max((abs(values[a] - values[b] - d) for (a, b), d in zip(corners, increments)), default=0.0)
    return values, float(closure)


def incenter(pts: np.ndarray) -> Tuple[complex, float]:
    """Intersection of the angle bisectors at the first two corners and the spread of side distances."""
    def bisector(k: int) -> complex:
        a = pts[(k + 1) % 4] - pts[k]
        b = pts[k - 1] - pts[k]
        return a / abs(a) + b / abs(b)

    d0, d1 = bisector(0), bisector(1)
    A = np.array([[d0.real, -d1.real], [d0.imag, -d1.imag]])
    rhs = np.array([(pts[1] - pts[0]).real, (pts[1] - pts[0]).imag])
    try:
        s, _ = np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError:
        raise LatticeError("not_tangential", "angle bisectors of a quad are parallel")
    center = complex(pts[0] + s * d0)
    dist = []
    for k in range(4):
        a, b = pts[k], pts[(k + 1) % 4]
        dist.append(abs(np.imag(np.conj(b - a) * (center - a))) / abs(b - a))
    return center, float(max(dist) - min(dist))


def tangential_tembedding(data: SEmbeddingData, name: str, mode: Mode = Mode.FINITE,
                          labels: Optional[Sequence[str]] = None) -> TEmbedding:
    """T = Λ ∪ {incircle centers}; each quad splits into four triangles (z, q_k, q_{k+1}).

    The triangle on side q_k q_{k+1} is black when q_k is an Ising vertex.
    Fills data.incenters, data.corner_black and data.corner_white.
    """
    S = data.positions
    n_lambda = len(S)
    labels = list(labels) if labels is not None else [f"x{k}" for k in range(n_lambda)]
    corner_of = {frozenset(c): k for k, c in enumerate(data.corners)}
    centers = []
    spread = 0.0
    for quad in data.quads:
        z, r = incenter(S[list(quad)])
        centers.append(z)
        spread = max(spread, r)
    data.incenters = np.array(centers, dtype=complex)
    data.residuals["tangency"] = spread
    data.corner_black = np.full(len(data.corners), -1, dtype=int)
    data.corner_white = np.full(len(data.corners), -1, dtype=int)

    faces: List[TFace] = []
    for k, quad in enumerate(data.quads):
        zk = n_lambda + k
        for s in range(4):
            a, b = quad[s], quad[(s + 1) % 4]
            black = bool(data.is_primal[a])
            c = corner_of[frozenset((a, b))]
            if black:
                data.corner_black[c] = len(faces)
            else:
                data.corner_white[c] = len(faces)
            faces.append(TFace(f"{'b' if black else 'w'}{k}_{s}", Color.BLACK if black else Color.WHITE, (zk, a, b)))
    ids = labels + [f"z{k}" for k in range(len(data.quads))]
    positions = np.concatenate([S, data.incenters])
    if spread > TANGENCY_TOL * max(float(np.max(np.abs(S - S[0]))), 1.0):
        logger.warning(f"s-embedding {name}: quads are not tangential (distance spread {spread:.3e})")
    return TEmbedding(positions, faces, ids, mode, name, {"lattice": "s-embedding"})


def _theta_grid(theta, n: int, m: int) -> np.ndarray:
    if np.ndim(theta) == 0:
        t = float(theta)
        grid = np.array([[t if (i + j) % 2 == 0 else np.pi / 2 - t for j in range(m)] for i in range(n)])
    else:
        grid = np.asarray(theta, dtype=float)
        if grid.shape != (n, m):
            raise LatticeError("bad_angle", f"theta has shape {grid.shape}; expected {(n, m)}")
    if np.any(grid <= 0) or np.any(grid >= np.pi / 2):
        raise LatticeError("bad_angle", "every Ising angle must lie in (0, π/2)",
                           value=float(grid.min() if np.any(grid <= 0) else grid.max()))
    return grid


def from_ising(n: int, m: int, theta=np.pi / 4, bottom: Optional[Sequence[complex]] = None,
               left: Optional[Sequence[complex]] = None, target: Optional[np.ndarray] = None,
               delta: float = 1.0, sigma: complex = DEFAULT_SIGMA, name: str = "s-embedding",
               mode: Mode = Mode.FINITE) -> Tuple[TEmbedding, SEmbeddingData]:
    """Propagate the spinor, integrate 𝒮 and 𝒬, and build the t-embedding.

    Args:
        n, m: Quads per row and per column
        theta: One angle (alternating θ, π/2 − θ between even and odd quads) or an (n, m) array
        bottom, left: Seed values of 𝒳 on H(i, 0) and V(0, j)
        target: Positions whose increments fix the missing seeds (default: critical rhombic)
        delta: Scale of the default target
        sigma: Global phase ς of η

    Raises:
        LatticeError: if an angle leaves (0, π/2) or the propagated spinor
            fails the propagation equation
    """
    theta_grid = _theta_grid(theta, n, m)
    corners, quads, quad_corners, pairs = grid_corners(n, m)
    if target is None:
        target = rhombic_target(n, m, float(theta_grid[0, 0]), delta)
    X = propagate_spinor(n, m, theta_grid, corners, quad_corners, pairs, bottom, left, np.asarray(target))
    n_lambda = (n + 1) * (m + 1)
    is_primal = np.array([(i + j) % 2 == 0 for j in range(m + 1) for i in range(n + 1)])
    data = SEmbeddingData(n, m, theta_grid, complex(sigma), np.zeros(n_lambda, dtype=complex), is_primal,
                          corners, X, np.zeros(n_lambda), quads, quad_corners, pairs)

    scale = max(float(np.max(np.abs(X))), 1.0)
    residual = float(np.max(propagation_residuals(data, X))) / scale
    data.residuals["propagation"] = residual
    if not np.all(np.isfinite(X)) or residual > PROPAGATION_TOL:
        raise LatticeError("propagation", f"spinor fails the propagation equation (residual {residual:.3e})",
                           value=residual)
    S, closure_s = integrate_corners(n_lambda, corners, X ** 2)
    Q, closure_q = integrate_corners(n_lambda, corners, np.abs(X) ** 2)
    Q = Q.real
    Q -= 0.5 * (Q[is_primal].mean() + Q[~is_primal].mean())
    data.positions, data.Q = S, Q
    data.residuals["closure_s"] = closure_s
    data.residuals["closure_q"] = closure_q
    labels = [f"s{i}_{j}" for j in range(m + 1) for i in range(n + 1)]
    te = tangential_tembedding(data, name, mode, labels)
    logger.info(f"s-embedding {name}: {n}x{m} quads, propagation residual {residual:.2e}, "
                f"tangency spread {data.residuals['tangency']:.2e}")
    return te, data


def spinor_eta(te: TEmbedding, data: SEmbeddingData) -> np.ndarray:
    """η_w(c) = ς·X̄(c)/|X(c)| and η_b(c) = ς̄·X̄(c)/|X(c)|."""
    eta = np.full(len(te.faces), np.nan + 0j, dtype=complex)
    unit = np.conj(data.X) / np.abs(data.X)
    for c in range(len(data.corners)):
        if data.corner_black[c] >= 0:
            eta[data.corner_black[c]] = np.conj(data.sigma) * unit[c]
        if data.corner_white[c] >= 0:
            eta[data.corner_white[c]] = data.sigma * unit[c]
    return eta


def _edge_weight(te: TEmbedding, data: SEmbeddingData, tail: int, head: int) -> float:
    """1 across an edge of Λ, cos θ towards an Ising vertex, sin θ towards a dual vertex."""
    n_lambda = data.n_lambda
    if tail < n_lambda and head < n_lambda:
        return 1.0
    z, v = (tail, head) if tail >= n_lambda else (head, tail)
    theta = data.quad_theta(z - n_lambda)
    return float(np.cos(theta) if data.is_primal[v] else np.sin(theta))


def check_dimer_weights(te: TEmbedding, data: SEmbeddingData) -> DiagnosticsReport:
    """Gauge equivalence of the Ising dimer weights (1, cos θ, sin θ) with |dT|.

    Solves log|dT| − log χ = g_b + g_w along a spanning tree of G and
    reports the largest defect on the remaining edges.
    """
    report = DiagnosticsReport(subject=f"Ising dimer weights on {te.name}")
    target = {e.index: float(np.log(abs(te.dT(e))) - np.log(_edge_weight(te, data, e.tail, e.head)))
              for e in te.g_edges}
    incident: Dict[int, List] = {}
    for e in te.g_edges:
        incident.setdefault(e.b, []).append(e)
        incident.setdefault(e.w, []).append(e)
    gauge: Dict[int, float] = {}
    for root in range(len(te.faces)):
        if root in gauge:
            continue
        gauge[root] = 0.0
        queue = deque([root])
        while queue:
            f = queue.popleft()
            for e in incident.get(f, ()):
                g = e.w if f == e.b else e.b
                if g not in gauge:
                    gauge[g] = target[e.index] - gauge[f]
                    queue.append(g)
    worst = 0.0
    for e in te.g_edges:
        r = abs(gauge[e.b] + gauge[e.w] - target[e.index])
        worst = max(worst, r)
        if r > GAUGE_TOL:
            report.add("gauge", te.faces[e.b].id, f"log weight defect {r:.3e}", value=r)
    report.metrics["max_residual"] = worst
    return report


def spinor_law(bundle: LatticeBundle, F: THoloFunction) -> DiagnosticsReport:
    """c ↦ ς·𝒳(c)·F^•(b(c)) is real and propagates, on quads away from punctures and the boundary."""
    data: SEmbeddingData = bundle.data
    te = bundle.te
    report = DiagnosticsReport(subject=f"spinor law on {te.name}")
    g = np.full(len(data.corners), np.nan + 0j, dtype=complex)
    for c, b in enumerate(data.corner_black):
        if b >= 0 and not np.isnan(F.coeffs[b]):
            g[c] = data.sigma * data.X[c] * F.projected(b)
    finite = g[~np.isnan(g)]
    scale = max(float(np.max(np.abs(finite))) if len(finite) else 0.0, 1e-300)
    imag = float(np.max(np.abs(finite.imag))) / scale if len(finite) else 0.0

    keep = []
    for k, quad_c in enumerate(data.quad_corners):
        faces = range(4 * k, 4 * k + 4)
        if any(f in F.punctures or f in te.boundary_faces for f in faces):
            continue
        if any(np.isnan(g[c]) for c in quad_c):
            continue
        keep.append(k)
    res = propagation_residuals(data, g.real, keep) / scale if keep else np.zeros(0)
    worst = float(res.max()) if len(res) else 0.0
    report.metrics["max_imaginary"] = imag
    report.metrics["max_propagation"] = worst
    report.metrics["n_quads"] = float(len(keep))
    if imag > 1e-9:
        report.add("not_real", te.name, f"spinor field has imaginary part {imag:.3e}", value=imag)
    if worst > 1e-9:
        report.add("propagation", te.name, f"spinor field fails propagation by {worst:.3e}", value=worst)
    return report


def normalized_origami(bundle: LatticeBundle) -> np.ndarray:
    """O shifted so that O = ς²𝒬 on Λ."""
    data: SEmbeddingData = bundle.data
    O = bundle.om.values
    return O - O[0] + data.sigma ** 2 * data.Q[0]


class SEmbeddingLattice(LatticeBuilder):
    """s-embedding of a size × size square-grid Ising model.

    With jitter = 0 the angles alternate θ, π/2 − θ and the result is the
    critical rhombic lattice; a positive jitter perturbs each angle with a
    seeded uniform draw. Non-embedded outputs are recorded, not raised.
    """

    strict = False

    def __init__(self, size: int, delta: float = 1.0, mode: Mode = Mode.FINITE, theta: float = np.pi / 4,
                 jitter: float = 0.0, seed: int = 0, sigma: complex = DEFAULT_SIGMA):
        super().__init__(size, delta, mode)
        grid = _theta_grid(theta, size, size)
        if jitter > 0:
            grid = grid + np.random.default_rng(seed).uniform(-jitter, jitter, size=grid.shape)
        self.theta = _theta_grid(grid, size, size)
        self.seed = seed
        self.sigma = complex(sigma)

    @property
    def kind(self) -> str:
        return "s-embedding"

    @property
    def framework(self) -> str:
        return "s-embedding"

    def tembedding(self) -> TEmbedding:
        target = rhombic_target(self.size, self.size, float(self.theta[0, 0]), self.delta)
        te, self.data = from_ising(self.size, self.size, self.theta, target=target, sigma=self.sigma,
                                   name=f"{self.kind}-{self.size}", mode=self.mode)
        return te

    def canonical_eta(self, te: TEmbedding) -> np.ndarray:
        return spinor_eta(te, self.data)

    def origami_base(self, te: TEmbedding) -> int:
        return 0

    def decorate(self, bundle: LatticeBundle) -> None:
        data = self.data
        bundle.data = data
        bundle.q = np.concatenate([data.Q, np.full(len(data.quads), np.nan)])
        O = normalized_origami(bundle)
        data.residuals["origami_q"] = float(np.max(np.abs(O[:data.n_lambda] - data.sigma ** 2 * data.Q)))
        data.residuals["dimer_gauge"] = check_dimer_weights(bundle.te, data).metrics["max_residual"]
        bundle.meta["seed"] = self.seed


def rhombic_positions(n: int, m: int, alphas: Sequence[float], betas: Sequence[float],
                      delta: float = 1.0) -> np.ndarray:
    """x(i, j) = δ(Σ_{k<i} e^{iα_k} + Σ_{l<j} e^{iβ_l}), one value per Λ vertex."""
    xs = np.concatenate([[0j], np.cumsum(delta * np.exp(1j * np.asarray(alphas, dtype=float)))])
    ys = np.concatenate([[0j], np.cumsum(delta * np.exp(1j * np.asarray(betas, dtype=float)))])
    return np.array([xs[i] + ys[j] for j in range(m + 1) for i in range(n + 1)])


def rhombic_angles(alphas: Sequence[float], betas: Sequence[float]) -> np.ndarray:
    """Half the rhombus angle at the Ising vertex of each quad.

    Raises:
        LatticeError: if two train-track directions do not give a positively oriented rhombus
    """
    n, m = len(alphas), len(betas)
    theta = np.empty((n, m))
    for i in range(n):
        for j in range(m):
            opening = betas[j] - alphas[i]
            if np.sin(opening) <= 0:
                raise LatticeError("bad_train_tracks", f"train tracks α_{i}, β_{j} do not form a rhombus",
                                   f"q{i}_{j}", float(opening))
            opening = np.mod(opening, 2 * np.pi)
            theta[i, j] = opening / 2 if (i + j) % 2 == 0 else (np.pi - opening) / 2
    return theta


def quadratic_laplacian_residual(data: SEmbeddingData, a: float = 1.0, b: float = 0.3,
                                 c: float = 0.5) -> float:
    """|Δ(ax² + 2bxy + cy²) − 2(a + c)| on interior Λ vertices, with Δ the rhombic cotangent Laplacian."""
    ortho = orthodiagonal_data(data.positions, data.is_primal, data.quads)
    x, y = data.positions.real, data.positions.imag
    ops = ortho_operators(ortho, a * x * x + 2 * b * x * y + c * y * y)
    if not ortho.interior:
        return 0.0
    return float(np.max(np.abs(ops.laplacian[ortho.interior] - 2 * (a + c))))


class IsoradialLattice(LatticeBuilder):
    """Critical Ising model on a rhombic lattice given by train-track angles.

    Defaults α_i = 0 and β_j = π/3 give the rhombic lattice of 60° rhombi.
    """

    def __init__(self, size: int, delta: float = 1.0, mode: Mode = Mode.FINITE,
                 alphas: Optional[Sequence[float]] = None, betas: Optional[Sequence[float]] = None,
                 sigma: complex = DEFAULT_SIGMA):
        super().__init__(size, delta, mode)
        self.alphas = np.zeros(size) if alphas is None else np.asarray(alphas, dtype=float)
        self.betas = np.full(size, np.pi / 3) if betas is None else np.asarray(betas, dtype=float)
        if len(self.alphas) != size or len(self.betas) != size:
            raise LatticeError("bad_train_tracks", f"need {size} angles per direction, got "
                                                   f"{len(self.alphas)} and {len(self.betas)}")
        self.theta = rhombic_angles(self.alphas, self.betas)
        self.sigma = complex(sigma)

    @property
    def kind(self) -> str:
        return "isoradial-rhombic"

    @property
    def framework(self) -> str:
        return "s-embedding"

    def tembedding(self) -> TEmbedding:
        target = rhombic_positions(self.size, self.size, self.alphas, self.betas, self.delta)
        te, self.data = from_ising(self.size, self.size, self.theta, target=target, sigma=self.sigma,
                                   name=f"{self.kind}-{self.size}", mode=self.mode)
        self.data.residuals["geometry"] = float(np.max(np.abs(self.data.positions - target)))
        return te

    def canonical_eta(self, te: TEmbedding) -> np.ndarray:
        return spinor_eta(te, self.data)

    def origami_base(self, te: TEmbedding) -> int:
        return 0

    def decorate(self, bundle: LatticeBundle) -> None:
        data = self.data
        bundle.data = data
        bundle.q = np.concatenate([data.Q, np.full(len(data.quads), np.nan)])
        O = normalized_origami(bundle)
        data.residuals["origami_q"] = float(np.max(np.abs(O[:data.n_lambda] - data.sigma ** 2 * data.Q)))
        radii = np.abs(O[data.n_lambda:])
        data.residuals["origami_radius"] = float(np.max(np.abs(radii - self.delta / 2)))
        data.residuals["dimer_gauge"] = check_dimer_weights(bundle.te, data).metrics["max_residual"]
        data.residuals["laplacian"] = quadratic_laplacian_residual(data)
        bundle.meta["alphas"] = self.alphas.tolist()
        bundle.meta["betas"] = self.betas.tolist()
