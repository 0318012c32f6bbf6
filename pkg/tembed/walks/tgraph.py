"""T-graphs T + α²O (black faces flatten) and T + conj(α²O) (white faces flatten).

With η' = η rotated by α both flavors read the same way: a face f of the
flattened color maps onto a translate of 2Pr(T(f), conj(η'_f)ℝ) and a face
of the open color onto a translate of (1 + η'_f²)T(f), which collapses to a
point when |1 + η'_f²| vanishes. Faces of the flattened color with more than
three vertices are fan-split first; each diagonal becomes an open 2-gon.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Set, Tuple

import numpy as np
from scipy.spatial import cKDTree

from tembed.core.errors import WalkError
from tembed.core.models import Color, Flavor
from tembed.embedding.origami import OrigamiField, OrigamiMap
from tembed.embedding.splitting import Splitting, build_splitting, triangle_area
from tembed.embedding.tembedding import TEmbedding

logger = logging.getLogger(__name__)

DEGENERACY_TOL = 1e-10
DEDUP_TOL = 1e-12  # relative to the embedding diameter


@dataclass(frozen=True)
class Segment:
    """Image of one flattened (sub-)triangle."""
    index: int
    parent: int  # face of T
    part: Optional[int]  # sub-triangle index of a split face
    vertices: Tuple[int, int, int]  # ccw vertices of T
    points: Tuple[int, int, int]  # T-graph points of the vertices
    middle: Optional[int]  # position in `vertices` of the middle point, None if two points coincide
    area: float  # area of the (sub-)triangle in T


@dataclass
class DegenerateRecord:
    """An open face (or diagonal 2-gon) collapsed to a single point."""
    point: int
    label: str
    targets: List[int] = field(default_factory=list)  # far endpoints v_k of the incident segments
    lengths: List[float] = field(default_factory=list)  # |dT| of the shared sides
    masses: List[float] = field(default_factory=list)  # m_k, summing to 1


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


@dataclass
class TGraph:
    """Points, segments, collapsed faces and sinks of a T-graph."""
    te: TEmbedding
    flavor: Flavor
    alpha: complex
    eta: OrigamiField  # rotated by α
    splitting: Splitting
    images: np.ndarray  # image of every vertex of T
    vertex_point: np.ndarray  # vertex of T -> point index
    points: np.ndarray  # point positions
    members: List[List[int]]
    segments: List[Segment]
    degenerate: Dict[int, DegenerateRecord]
    sinks: Set[int]
    owner: Dict[int, int]  # point -> segment index
    open_faces: Dict[int, List[int]] = field(default_factory=dict)  # open face -> polygon of points

    @property
    def flat_color(self) -> Color:
        return Color.BLACK if self.flavor is Flavor.BLACK_FLAT else Color.WHITE

    @property
    def n_points(self) -> int:
        return len(self.points)

    def label(self, p: int) -> str:
        """Parent face id of the owning segment, "deg:<face>" or "sink"."""
        if p in self.sinks:
            return "sink"
        if p in self.degenerate:
            return f"deg:{self.degenerate[p].label}"
        return self.te.faces[self.segments[self.owner[p]].parent].id

    def to_dict(self) -> dict:
        te = self.te
        return {
            "flavor": self.flavor.value,
            "alpha": [self.alpha.real, self.alpha.imag],
            "splitting": self.splitting.id,
            "points": [[float(z.real), float(z.imag)] for z in self.points],
            "members": [[te.vertex_ids[v] for v in m] for m in self.members],
            "segments": [
                {"face": te.faces[s.parent].id, "part": s.part, "points": list(s.points), "middle": s.middle}
                for s in self.segments
            ],
            "degenerate": {str(p): {"face": r.label, "masses": r.masses} for p, r in sorted(self.degenerate.items())},
            "sinks": sorted(self.sinks),
        }


def tgraph_map(te: TEmbedding, om: OrigamiMap, alpha: complex, flavor: Flavor) -> np.ndarray:
    shift = alpha ** 2 * om.values
    if flavor is Flavor.WHITE_FLAT:
        shift = np.conj(shift)
    return te.positions + shift


def build_tgraph(te: TEmbedding, eta: OrigamiField, om: OrigamiMap, alpha: complex = 1.0,
                 flavor: Flavor = Flavor.BLACK_FLAT, splitting: Optional[Splitting] = None) -> TGraph:
    """Build the T-graph of a t-embedding for a unit α.

    Args:
        te: Validated t-embedding
        eta: Its origami square root function
        om: Its origami map
        alpha: Unit complex parameter
        flavor: BLACK_FLAT for T + α²O, WHITE_FLAT for T + conj(α²O)
        splitting: Splitting of the flattened color (default: fan splitting)

    Returns:
        TGraph with segment ownership, degenerate points and sinks

    Raises:
        WalkError: if a point is owned by two segments or an interior point by none
    """
    alpha = complex(alpha) / abs(alpha)
    flat = Color.BLACK if flavor is Flavor.BLACK_FLAT else Color.WHITE
    if splitting is None:
        splitting = build_splitting(te, flat)
    elif splitting.color is not flat:
        raise WalkError("bad_splitting", f"splitting of {splitting.color.value} faces given for a {flavor.value} T-graph")
    rot = eta.rotated(alpha)
    images = tgraph_map(te, om, alpha, flavor)
    n = te.n_vertices

    # collapse open faces and diagonals
    uf = _UnionFind(n)
    collapsed: List[Tuple[str, List[Tuple[int, int]], List[int]]] = []
    for f in te.faces_of(flat.other):
        if abs(1 + rot.eta2[f]) < DEGENERACY_TOL:
            cycle = te.faces[f].cycle
            for v in cycle[1:]:
                uf.union(cycle[0], v)
            collapsed.append((te.faces[f].id, te.faces[f].sides(), list(cycle)))
    for f, sf in splitting.faces.items():
        for j, (a, c) in enumerate(sf.diagonals):
            e = splitting.diagonal_eta(te, rot, f, j)
            if abs(1 + e ** 2) < DEGENERACY_TOL:
                uf.union(a, c)
                collapsed.append((f"{te.faces[f].id}/d{j}", [(a, c), (c, a)], [a, c]))

    tol = DEDUP_TOL * max(te.diameter, 1.0)
    used = sorted({v for face in te.faces for v in face.cycle})
    tree = cKDTree(np.column_stack([images[used].real, images[used].imag]))
    for i, j in tree.query_pairs(tol):
        uf.union(used[i], used[j])

    roots = sorted({uf.find(v) for v in used})
    index = {r: k for k, r in enumerate(roots)}
    vertex_point = np.full(n, -1, dtype=int)
    members: List[List[int]] = [[] for _ in roots]
    for v in used:
        p = index[uf.find(v)]
        vertex_point[v] = p
        members[p].append(v)
    points = np.array([images[m].mean() for m in members], dtype=complex)
    sinks = {int(vertex_point[v]) for v in te.boundary_vertices}

    segments: List[Segment] = []
    tri_of_side: Dict[Tuple[int, int], int] = {}
    for f in te.faces_of(flat):
        for j, tri in enumerate(splitting.triangles(te, f)):
            pts = tuple(int(vertex_point[v]) for v in tri)
            middle = None
            if len(set(pts)) == 3:
                direction = np.conj(rot.eta[f])
                s = [np.real(np.conj(direction) * points[p]) for p in pts]
                middle = int(np.argsort(s)[1])
            seg = Segment(len(segments), f, j if splitting.is_split(f) else None, tuple(tri), pts, middle,
                          abs(triangle_area(te.positions[list(tri)])))
            segments.append(seg)
            for k in range(3):
                tri_of_side[(tri[k], tri[(k + 1) % 3])] = seg.index

    degenerate: Dict[int, DegenerateRecord] = {}
    for label, sides, cycle in collapsed:
        p = int(vertex_point[cycle[0]])
        record = degenerate.setdefault(p, DegenerateRecord(p, label))
        for u, v in sides:
            s = tri_of_side.get((v, u))
            if s is None:
                continue
            seg = segments[s]
            far = [q for q in seg.points if q != p]
            if not far:
                continue
            record.targets.append(far[0])
            record.lengths.append(float(abs(te.positions[v] - te.positions[u])))
    for record in degenerate.values():
        weights = np.array([length * abs(points[q] - points[record.point])
                            for q, length in zip(record.targets, record.lengths)])
        total = weights.sum()
        record.masses = list(weights / total) if total > 0 else []

    owner: Dict[int, int] = {}
    for seg in segments:
        if seg.middle is None:
            continue
        p = seg.points[seg.middle]
        if p in degenerate:
            continue
        if p in owner and p not in sinks:
            raise WalkError("overlap", f"point {p} lies inside two segments; the T-graph overlaps",
                            te.vertex_ids[seg.vertices[seg.middle]])
        owner[p] = seg.index
    for p in range(len(points)):
        if p not in owner and p not in degenerate and p not in sinks:
            raise WalkError("no_owner", f"interior point {p} lies inside no segment", te.vertex_ids[members[p][0]])

    open_faces = {}
    for f in te.faces_of(flat.other):
        poly = [int(vertex_point[v]) for v in te.faces[f].cycle]
        open_faces[f] = poly

    logger.info(
        f"T-graph {flavor.value} alpha={alpha:.4f} on {te.name}: {len(points)} points, "
        f"{len(segments)} segments, {len(degenerate)} degenerate, {len(sinks)} sinks"
    )
    return TGraph(te, flavor, alpha, rot, splitting, images, vertex_point, points, members, segments,
                  degenerate, sinks, owner, open_faces)


def check_open_orientation(tg: TGraph) -> int:
    """Number of non-collapsed open faces whose image reverses orientation."""
    bad = 0
    for f, poly in tg.open_faces.items():
        z = tg.images[list(tg.te.faces[f].cycle)]
        area = 0.5 * float(np.sum((np.conj(z) * np.roll(z, -1)).imag))
        if len(set(poly)) > 2 and area < 0:
            bad += 1
    return bad
