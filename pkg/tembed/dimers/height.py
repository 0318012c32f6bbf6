"""Height functions of perfect matchings and exact height correlations.

Crossing the G-edge bw along its dual edge of T (tail -> head, b on the
right) changes the height by 𝟙[bw ∈ P] − 𝟙[bw ∈ P₀]. Differenced centered
heights ħ(v) − ħ(ṽ) are sums of ±(𝟙[e ∈ P] − P(e ∈ P)) over the edges of
a path from ṽ to v, so their joint moments reduce to the zero-diagonal
determinants ∏K(b_k, w_k)·det[𝟙_{j≠k} K⁻¹(w_j, b_k)].
"""
import itertools
import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from tembed.core.errors import DimerError
from tembed.dimers.inverse import CouplingMatrix
from tembed.dimers.matchings import check_perfect, edge_probabilities
from tembed.embedding.tembedding import TEmbedding

logger = logging.getLogger(__name__)

MAX_CORRELATION_POINTS = 6

# (G-edge id, ±1) for every step of a dual path that crosses an edge of G
SignedEdges = List[Tuple[int, int]]


@dataclass
class HeightField:
    """Integer height on the vertices of T relative to a reference matching."""
    h: np.ndarray
    matching: FrozenSet[int]
    reference: FrozenSet[int]
    basepoint: int
    flow: Dict[int, int] = field(default_factory=dict)  # G-edge id -> 𝟙[P] − 𝟙[P₀], nonzero entries

    def to_dict(self, te: TEmbedding) -> dict:
        return {
            "basepoint": te.vertex_ids[self.basepoint],
            "h": {te.vertex_ids[v]: int(x) for v, x in enumerate(self.h)},
            "matching": sorted(self.matching),
            "reference": sorted(self.reference),
        }


def _half_edge_signs(te: TEmbedding) -> Dict[Tuple[int, int], Tuple[int, int]]:
    """(u, v) -> (G-edge id, sign) for every interior edge of T in both directions."""
    out = {}
    for e in te.g_edges:
        out[(e.tail, e.head)] = (e.index, 1)
        out[(e.head, e.tail)] = (e.index, -1)
    return out


def height_function(te: TEmbedding, matching: Iterable[int], reference: Iterable[int],
                    basepoint: Optional[int] = None) -> HeightField:
    """Primitive of the flow P − P₀ on the vertices of T.

    Args:
        te: The t-embedding
        matching: Edge ids of P
        reference: Edge ids of P₀
        basepoint: Vertex with height 0 (default: the first boundary vertex, else vertex 0)

    Raises:
        DimerError: if P or P₀ is not perfect, or the flow is not divergence-free
    """
    P = check_perfect(te, matching)
    P0 = check_perfect(te, reference)
    flow = {e: 1 for e in P - P0}
    flow.update({e: -1 for e in P0 - P})

    div = np.zeros(len(te.faces), dtype=int)
    for eid, value in flow.items():
        e = te.g_edges[eid]
        div[e.b] += value
        div[e.w] += value
    for f in np.flatnonzero(div):
        face = te.faces[f]
        raise DimerError("not_divergence_free", f"flow P − P₀ has divergence {div[f]} at {face.id}", face.id)

    if basepoint is None:
        basepoint = min(te.boundary_vertices) if te.boundary_vertices else te.faces[0].cycle[0]
    signs = _half_edge_signs(te)
    adjacency: Dict[int, List[int]] = {}
    for u, v in te.half_edges:
        adjacency.setdefault(u, []).append(v)
        adjacency.setdefault(v, []).append(u)

    h = np.zeros(te.n_vertices, dtype=int)
    seen = {basepoint}
    queue = deque([basepoint])
    while queue:
        u = queue.popleft()
        for v in adjacency.get(u, ()):
            eid, s = signs.get((u, v), (None, 0))
            value = h[u] + (s * flow.get(eid, 0) if eid is not None else 0)
            if v in seen:
                if h[v] != value:
                    raise DimerError("path_dependent", f"height differs along two paths to {te.vertex_ids[v]}",
                                     te.vertex_ids[v])
                continue
            h[v] = value
            seen.add(v)
            queue.append(v)
    logger.debug(f"Height function on {te.name}: range [{h.min()}, {h.max()}]")
    return HeightField(h, P, P0, basepoint, flow)


def dual_path(te: TEmbedding, source: int, target: int) -> List[int]:
    """Shortest path of T-edges (Euclidean length) between two vertices of T."""
    g = nx.Graph()
    z = te.positions
    for u, v in te.half_edges:
        g.add_edge(u, v, weight=float(abs(z[v] - z[u])))
    try:
        return nx.shortest_path(g, source, target, weight="weight")
    except nx.NetworkXNoPath:
        raise DimerError("no_path", f"{te.vertex_ids[target]} is not reachable from {te.vertex_ids[source]}")


def path_edges(te: TEmbedding, path: Sequence[int]) -> SignedEdges:
    """Signed G-edges crossed along a path of T; boundary edges cross nothing."""
    signs = _half_edge_signs(te)
    return [signs[(u, v)] for u, v in zip(path[:-1], path[1:]) if (u, v) in signs]


def height_difference(te: TEmbedding, hf: HeightField, path: Sequence[int]) -> int:
    """h(end) − h(start) summed along a path; equals the pointwise difference when h is well defined."""
    return int(sum(s * hf.flow.get(e, 0) for e, s in path_edges(te, path)))


@dataclass
class CorrelationResult:
    """E[∏(ħ(v_k) − ħ(ṽ_k))] with its provenance."""
    points: List[int]
    anchors: List[int]
    value: float
    n_tuples: int
    n_repeated: int  # tuples where two paths share an edge
    gff: Optional[float] = None  # π^{−n/2} G_{Ω,n} at the point positions
    mesh: Optional[float] = None

    @property
    def ratio(self) -> Optional[float]:
        if self.gff is None or self.gff == 0:
            return None
        return self.value / self.gff

    def to_dict(self, te: TEmbedding) -> dict:
        return {
            "points": [te.vertex_ids[v] for v in self.points],
            "anchors": [te.vertex_ids[v] for v in self.anchors],
            "value": self.value,
            "gff": self.gff,
            "ratio": self.ratio,
            "n_tuples": self.n_tuples,
            "n_repeated": self.n_repeated,
            "mesh": self.mesh,
        }


def _centered_moment(te: TEmbedding, cm: CouplingMatrix, probs: np.ndarray, eids: Sequence[int]) -> complex:
    """E[∏_k (𝟙[e_k ∈ P] − p_k)] for edges that may repeat."""
    counts: Dict[int, int] = {}
    for e in eids:
        counts[e] = counts.get(e, 0) + 1
    distinct = list(counts)
    if len(distinct) == len(eids):
        edges = [te.g_edges[e] for e in eids]
        M = np.array([[cm.inv(ej.w, ek.b) for ek in edges] for ej in edges])
        np.fill_diagonal(M, 0.0)
        return np.prod([cm.K.entry(e.b, e.w) for e in edges]) * np.linalg.det(M)
    # (X − p)^m = c + d·X on indicators
    c = {e: (-probs[e]) ** m for e, m in counts.items()}
    d = {e: (1 - probs[e]) ** m - (-probs[e]) ** m for e, m in counts.items()}
    total = 0.0 + 0.0j
    for r in range(len(distinct) + 1):
        for subset in itertools.combinations(distinct, r):
            coeff = np.prod([d[e] for e in subset]) * np.prod([c[e] for e in distinct if e not in subset])
            if coeff == 0:
                continue
            total += coeff * _joint(te, cm, subset)
    return total


def _joint(te: TEmbedding, cm: CouplingMatrix, eids: Sequence[int]) -> complex:
    if not eids:
        return 1.0
    edges = [te.g_edges[e] for e in eids]
    if len({e.b for e in edges}) < len(edges) or len({e.w for e in edges}) < len(edges):
        return 0.0
    M = np.array([[cm.inv(ej.w, ek.b) for ek in edges] for ej in edges])
    return np.prod([cm.K.entry(e.b, e.w) for e in edges]) * np.linalg.det(M)


def height_correlations(te: TEmbedding, cm: CouplingMatrix, points: Sequence[int],
                        anchors: Sequence[int]) -> CorrelationResult:
    """Exact E[∏_k (ħ(v_k) − ħ(ṽ_k))] from the coupling function.

    Each difference is expanded along a shortest path γ_k from ṽ_k to v_k
    and the product is summed over all edge tuples (e_1, …, e_n), e_k ∈ γ_k.

    Raises:
        DimerError: if more than MAX_CORRELATION_POINTS points are requested
    """
    points, anchors = list(points), list(anchors)
    n = len(points)
    if n > MAX_CORRELATION_POINTS:
        raise DimerError("too_many_points", f"{n} points requested; the determinant expansion is limited "
                                            f"to {MAX_CORRELATION_POINTS}")
    if len(anchors) != n:
        raise DimerError("bad_anchors", f"{len(anchors)} anchors for {n} points")
    probs = edge_probabilities(te, cm)
    paths = [path_edges(te, dual_path(te, a, v)) for v, a in zip(points, anchors)]
    total = 0.0 + 0.0j
    n_tuples = 0
    n_repeated = 0
    for combo in itertools.product(*paths):
        eids = [e for e, _ in combo]
        sign = int(np.prod([s for _, s in combo]))
        if len(set(eids)) < len(eids):
            n_repeated += 1
        total += sign * _centered_moment(te, cm, probs, eids)
        n_tuples += 1
    if n_repeated:
        logger.info(f"{n_repeated} of {n_tuples} edge tuples share an edge; expanded exactly")
    if abs(total.imag) > 1e-8 * max(1.0, abs(total.real)):
        logger.warning(f"Height correlation has imaginary part {total.imag:.3e}")
    return CorrelationResult(points, anchors, float(total.real), n_tuples, n_repeated,
                             mesh=te.mesh_size)


def boundary_anchor(te: TEmbedding, near: int) -> int:
    """Boundary vertex of T closest to a vertex."""
    if not te.boundary_vertices:
        raise DimerError("no_boundary", f"{te.name} has no boundary to anchor heights")
    z = te.positions
    return min(sorted(te.boundary_vertices), key=lambda b: abs(z[b] - z[near]))


def absolute_h2(te: TEmbedding, cm: CouplingMatrix, points: Sequence[int],
                anchor: Optional[int] = None) -> np.ndarray:
    """Covariance matrix E[ħ(v_i)ħ(v_j)] with heights measured from one boundary anchor."""
    points = list(points)
    if anchor is None:
        anchor = boundary_anchor(te, points[0])
    n = len(points)
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            r = height_correlations(te, cm, [points[i], points[j]], [anchor, anchor])
            out[i, j] = out[j, i] = r.value
    return out


def anchor_sensitivity(te: TEmbedding, cm: CouplingMatrix, points: Sequence[int],
                       anchors: Tuple[int, int]) -> float:
    """Largest change of the absolute H_2 matrix between two boundary anchors."""
    a = absolute_h2(te, cm, points, anchors[0])
    b = absolute_h2(te, cm, points, anchors[1])
    return float(np.max(np.abs(a - b)))
