"""Perfect matchings: brute-force enumeration, edge probabilities and exact sampling.

Edges are G-edges of the t-embedding, identified by their index in
te.g_edges (the same ids te.to_dimer_graph() assigns). The probability
of a set of vertex-disjoint edges is det[K⁻¹(w_j, b_k)]·∏K(b_k, w_k).
"""
import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Tuple

import numpy as np

from tembed.core.errors import DimerError
from tembed.dimers.inverse import CouplingMatrix
from tembed.embedding.tembedding import GEdge, TEmbedding
from tembed.graph.dimer_graph import DimerGraph

logger = logging.getLogger(__name__)

MAX_ENUMERATION_EDGES = 24
PROBABILITY_TOL = 1e-8


@dataclass(frozen=True)
class Matching:
    """A perfect matching as a set of edge ids, with its weight ∏x(e)."""
    edges: FrozenSet[int]
    weight: float = 1.0

    def to_dict(self) -> dict:
        return {"edges": sorted(self.edges), "weight": self.weight}


@dataclass
class MatchingEnumeration:
    """All perfect matchings of a small graph and the partition function."""
    matchings: List[Matching]
    Z: float

    def probability(self, edges: Iterable[int]) -> float:
        """Exact probability that all given edges are present."""
        wanted = set(edges)
        return sum(m.weight for m in self.matchings if wanted <= m.edges) / self.Z

    def expectation(self, f) -> float:
        """E[f(matching)] under the dimer measure."""
        return sum(m.weight * f(m) for m in self.matchings) / self.Z


def enumerate_matchings(graph: DimerGraph) -> MatchingEnumeration:
    """Enumerate every perfect matching of G by backtracking over black vertices.

    Raises:
        DimerError: if G has more than MAX_ENUMERATION_EDGES edges or no perfect matching
    """
    if len(graph.edges) > MAX_ENUMERATION_EDGES:
        raise DimerError("too_large", f"{graph.name} has {len(graph.edges)} edges; "
                                      f"enumeration is limited to {MAX_ENUMERATION_EDGES}")
    if len(graph.black) != len(graph.white):
        raise DimerError("no_matching", f"{graph.name} has {len(graph.black)} black and {len(graph.white)} white vertices")
    incident: Dict[str, List[int]] = {b: [] for b in graph.black}
    for e in graph.edges:
        incident[e.b].append(e.id)
    blacks = sorted(graph.black, key=lambda b: len(incident[b]))
    matchings: List[Matching] = []

    def extend(i: int, used_white: set, chosen: List[int], weight: float):
        if i == len(blacks):
            matchings.append(Matching(frozenset(chosen), weight))
            return
        for eid in incident[blacks[i]]:
            e = graph.edges[eid]
            if e.w in used_white:
                continue
            used_white.add(e.w)
            chosen.append(eid)
            extend(i + 1, used_white, chosen, weight * e.x)
            chosen.pop()
            used_white.discard(e.w)

    extend(0, set(), [], 1.0)
    if not matchings:
        raise DimerError("no_matching", f"{graph.name} has no perfect matching")
    Z = float(sum(m.weight for m in matchings))
    logger.info(f"Enumerated {len(matchings)} perfect matchings of {graph.name}, Z={Z:.6g}")
    return MatchingEnumeration(matchings, Z)


def _as_edges(te: TEmbedding, edges: Iterable) -> List[GEdge]:
    out = []
    for e in edges:
        if isinstance(e, GEdge):
            out.append(e)
        elif isinstance(e, (int, np.integer)):
            out.append(te.g_edges[int(e)])
        else:
            b, w = e
            try:
                out.append(te.edge_between[(b, w)])
            except KeyError:
                raise DimerError("not_an_edge", f"faces {te.faces[b].id} and {te.faces[w].id} are not adjacent")
    return out


def matching_probability(te: TEmbedding, cm: CouplingMatrix, edges: Iterable) -> float:
    """Probability that every edge of a vertex-disjoint set is in the random matching.

    Args:
        te: The t-embedding
        cm: Its coupling matrix
        edges: GEdges, edge ids or (black, white) face index pairs

    Returns:
        Probability (1 for the empty set)

    Raises:
        DimerError: if two edges share a vertex of G
    """
    edges = _as_edges(te, edges)
    if not edges:
        return 1.0
    blacks = [e.b for e in edges]
    whites = [e.w for e in edges]
    if len(set(blacks)) < len(blacks) or len(set(whites)) < len(whites):
        raise DimerError("overlapping", "edges of a joint probability must be vertex-disjoint")
    M = np.array([[cm.inv(w, b) for b in blacks] for w in whites])
    weight = np.prod([cm.K.entry(e.b, e.w) for e in edges])
    p = weight * np.linalg.det(M)
    if abs(p.imag) > PROBABILITY_TOL * max(1.0, abs(p.real)):
        logger.warning(f"Matching probability has imaginary part {p.imag:.3e}")
    return float(p.real)


def edge_probabilities(te: TEmbedding, cm: CouplingMatrix) -> np.ndarray:
    """P(e ∈ matching) = K(b, w)K⁻¹(w, b) for every G-edge, indexed like te.g_edges."""
    return np.array([(cm.K.entry(e.b, e.w) * cm.inv(e.w, e.b)).real for e in te.g_edges])


def sample_matching(te: TEmbedding, cm: CouplingMatrix, seed: int = 0) -> Matching:
    """Draw a perfect matching from the dimer measure.

    Whites are matched in index order. Given the edges chosen so far, the
    chance that w pairs with b is K(b, w)·M(w, b), where M is K⁻¹ of the
    remaining graph; choosing bw updates M by the rank-1 Schur complement
    M ← M − M[:, b]M[w, :]/M[w, b].

    Raises:
        DimerError: if a conditional probability leaves [−1e−8, 1 + 1e−8]
    """
    rng = np.random.default_rng(seed)
    K = cm.K
    M = np.array(cm.Kinv, dtype=complex)
    alive_b = np.ones(len(K.black), dtype=bool)
    neighbors: Dict[int, List[GEdge]] = {}
    for e in te.g_edges:
        neighbors.setdefault(e.w, []).append(e)
    chosen: List[int] = []
    weight = 1.0
    for w in K.white:
        wi = K.w_index[w]
        options = [e for e in neighbors.get(w, []) if alive_b[K.b_index[e.b]]]
        probs = np.array([(K.entry(e.b, w) * M[wi, K.b_index[e.b]]).real for e in options])
        if not options or np.any(probs < -PROBABILITY_TOL) or np.any(probs > 1 + PROBABILITY_TOL) \
                or abs(probs.sum() - 1) > 1e3 * PROBABILITY_TOL:
            raise DimerError("numerical", f"conditional probabilities at {te.faces[w].id} left [0, 1]",
                             te.faces[w].id, float(probs.sum()) if len(probs) else None)
        probs = np.clip(probs, 0.0, None)
        pick = options[int(rng.choice(len(options), p=probs / probs.sum()))]
        bi = K.b_index[pick.b]
        M = M - np.outer(M[:, bi], M[wi, :]) / M[wi, bi]
        alive_b[bi] = False
        chosen.append(pick.index)
        weight *= abs(te.dT(pick))
    logger.debug(f"Sampled a matching of {te.name} with seed {seed}")
    return Matching(frozenset(chosen), weight)


def check_perfect(te: TEmbedding, edges: Iterable[int]) -> FrozenSet[int]:
    """Validate that the edge ids cover every face of T exactly once.

    Raises:
        DimerError: if some face is uncovered or covered twice
    """
    edges = frozenset(int(e) for e in edges)
    cover: Dict[int, int] = {}
    for eid in edges:
        e = te.g_edges[eid]
        cover[e.b] = cover.get(e.b, 0) + 1
        cover[e.w] = cover.get(e.w, 0) + 1
    for f in range(len(te.faces)):
        if cover.get(f, 0) != 1:
            raise DimerError("not_perfect", f"face {te.faces[f].id} is covered {cover.get(f, 0)} times",
                             te.faces[f].id)
    return edges


def matching_pairs(te: TEmbedding, m: Matching) -> List[Tuple[str, str]]:
    """(black id, white id) pairs of a matching."""
    return [(te.faces[te.g_edges[e].b].id, te.faces[te.g_edges[e].w].id) for e in sorted(m.edges)]

