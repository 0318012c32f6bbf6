"""T-embeddings: straight-line embeddings of the augmented dual G*.

Faces of a TEmbedding are the vertices of the dimer graph G. Every face
is stored as a counterclockwise cycle of vertex indices; the half-edge
u -> v of a face has that face on its left. An interior edge of T is
shared by one black and one white face and is the dual edge bw* of an
edge of G; edges without a twin form the boundary and carry no G-edge.
"""
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy as np
from scipy.spatial import cKDTree

from tembed.core.errors import EmbeddingError
from tembed.core.models import Color, DiagnosticsReport, Mode, Severity
from tembed.graph.dimer_graph import DimerGraph, Edge
from tembed.graph.dual import build_augmented_dual

logger = logging.getLogger(__name__)

ANGLE_TOL = 1e-9  # radians, per unit of vertex degree
CONVEXITY_TOL = 1e-12  # relative to squared edge lengths


@dataclass(frozen=True)
class TFace:
    """A face of the t-embedding."""
    id: str
    color: Color
    cycle: Tuple[int, ...]  # ccw vertex indices

    @property
    def degree(self) -> int:
        return len(self.cycle)

    def sides(self) -> List[Tuple[int, int]]:
        n = len(self.cycle)
        return [(self.cycle[i], self.cycle[(i + 1) % n]) for i in range(n)]

    def next_of(self, v: int) -> int:
        i = self.cycle.index(v)
        return self.cycle[(i + 1) % len(self.cycle)]

    def prev_of(self, v: int) -> int:
        i = self.cycle.index(v)
        return self.cycle[i - 1]


@dataclass(frozen=True)
class GEdge:
    """Edge bw of G seen as the interior edge tail -> head of T.

    tail -> head runs counterclockwise around the white face, so that
    dT(bw*) = T(head) - T(tail) has b on its right.
    """
    index: int
    b: int
    w: int
    tail: int
    head: int


class TEmbedding:
    """Straight-line embedding of G* with colored convex faces."""

    def __init__(self, positions: Sequence[complex], faces: Sequence[TFace],
                 vertex_ids: Optional[Sequence[str]] = None, mode: Mode = Mode.FINITE,
                 name: str = "t-embedding", meta: Optional[dict] = None):
        self.positions = np.asarray(positions, dtype=complex)
        self.faces: List[TFace] = list(faces)
        n = len(self.positions)
        self.vertex_ids: List[str] = list(vertex_ids) if vertex_ids is not None else [f"v{i}" for i in range(n)]
        self.mode = mode
        self.name = name
        self.meta = dict(meta or {})

        self.half_edges: Dict[Tuple[int, int], int] = {}
        for fi, face in enumerate(self.faces):
            for u, v in face.sides():
                if (u, v) in self.half_edges:
                    raise EmbeddingError(
                        "overlap",
                        f"half-edge {self.vertex_ids[u]}->{self.vertex_ids[v]} used by two faces",
                        face.id,
                    )
                self.half_edges[(u, v)] = fi
        logger.debug(f"TEmbedding {name}: {n} vertices, {len(self.faces)} faces")

    # ------------------------------------------------------------------
    # Combinatorics

    @property
    def n_vertices(self) -> int:
        return len(self.positions)

    @cached_property
    def face_index(self) -> Dict[str, int]:
        return {f.id: i for i, f in enumerate(self.faces)}

    @cached_property
    def black(self) -> List[int]:
        return [i for i, f in enumerate(self.faces) if f.color is Color.BLACK]

    @cached_property
    def white(self) -> List[int]:
        return [i for i, f in enumerate(self.faces) if f.color is Color.WHITE]

    def faces_of(self, color: Color) -> List[int]:
        return self.black if color is Color.BLACK else self.white

    def neighbor(self, u: int, v: int) -> Optional[int]:
        """Face across the half-edge u -> v, or None on the boundary."""
        return self.half_edges.get((v, u))

    @cached_property
    def boundary_half_edges(self) -> List[Tuple[int, int]]:
        return [(u, v) for (u, v) in self.half_edges if (v, u) not in self.half_edges]

    @cached_property
    def boundary_vertices(self) -> Set[int]:
        out = set()
        for u, v in self.boundary_half_edges:
            out.add(u)
            out.add(v)
        return out

    @cached_property
    def boundary_faces(self) -> Set[int]:
        return {self.half_edges[h] for h in self.boundary_half_edges}

    @cached_property
    def interior_vertices(self) -> List[int]:
        used = {v for f in self.faces for v in f.cycle}
        return [v for v in range(self.n_vertices) if v in used and v not in self.boundary_vertices]

    @cached_property
    def g_edges(self) -> List[GEdge]:
        edges = []
        for w in self.white:
            for u, v in self.faces[w].sides():
                b = self.neighbor(u, v)
                if b is not None and self.faces[b].color is Color.BLACK:
                    edges.append(GEdge(len(edges), b, w, u, v))
        return edges

    @cached_property
    def edge_between(self) -> Dict[Tuple[int, int], GEdge]:
        """G-edge per (black face, white face) pair."""
        return {(e.b, e.w): e for e in self.g_edges}

    def dT(self, e: GEdge) -> complex:
        return complex(self.positions[e.head] - self.positions[e.tail])

    @cached_property
    def areas(self) -> np.ndarray:
        out = np.empty(len(self.faces))
        for i, f in enumerate(self.faces):
            z = self.positions[list(f.cycle)]
            out[i] = 0.5 * float(np.sum((np.conj(z) * np.roll(z, -1)).imag))
        return out

    @cached_property
    def diameter(self) -> float:
        z = self.positions
        if len(z) == 0:
            return 0.0
        return float(max(np.ptp(z.real), np.ptp(z.imag)) * np.sqrt(2.0))

    @cached_property
    def mesh_size(self) -> float:
        """Maximal face diameter."""
        best = 0.0
        for f in self.faces:
            z = self.positions[list(f.cycle)]
            best = max(best, float(np.max(np.abs(z[:, None] - z[None, :]))))
        return best

    def vertex_star(self, v: int) -> Tuple[List[int], bool]:
        """Faces around v in counterclockwise order, and whether they close up."""
        incident = self._vertex_face.get(v, [])
        if not incident:
            return [], False
        start = incident[0]
        # rewind clockwise to the first face of an open fan
        seen = {start}
        while True:
            f = self.faces[start]
            cw = self.half_edges.get((f.next_of(v), v))
            if cw is None or cw in seen:
                break
            seen.add(cw)
            start = cw
        order = [start]
        closed = False
        while True:
            f = self.faces[order[-1]]
            nxt = self.half_edges.get((v, f.prev_of(v)))
            if nxt is None:
                break
            if nxt == order[0]:
                closed = True
                break
            order.append(nxt)
        return order, closed

    @cached_property
    def _vertex_face(self) -> Dict[int, List[int]]:
        out: Dict[int, List[int]] = {}
        for fi, f in enumerate(self.faces):
            for v in f.cycle:
                out.setdefault(v, []).append(fi)
        return out

    def sector_angle(self, face: int, v: int) -> float:
        """Interior angle θ(face, v), in (0, 2π)."""
        f = self.faces[face]
        z = self.positions
        a = z[f.next_of(v)] - z[v]
        c = z[f.prev_of(v)] - z[v]
        return float(np.mod(np.angle(c / a), 2 * np.pi))

    # ------------------------------------------------------------------
    # Conversions

    def to_dimer_graph(self) -> DimerGraph:
        """The dimer graph G whose augmented dual this embedding draws."""
        black = tuple(self.faces[i].id for i in self.black)
        white = tuple(self.faces[i].id for i in self.white)
        edges = tuple(
            Edge(e.index, self.faces[e.b].id, self.faces[e.w].id, abs(self.dT(e)))
            for e in self.g_edges
        )
        lookup = {(e.tail, e.head): e.index for e in self.g_edges}
        lookup.update({(e.head, e.tail): e.index for e in self.g_edges})
        rotation = {}
        for f in self.faces:
            rotation[f.id] = tuple(lookup[s] for s in f.sides() if s in lookup)
        graph = DimerGraph(black, white, edges, rotation, None, self.name)
        # the outer face of G is the one not drawn around an interior vertex
        inner = set()
        for v in self.interior_vertices:
            star, _ = self.vertex_star(v)
            inner.add(tuple(sorted({self.faces[i].id for i in star})))
        outer = [f.id for f in graph.faces if tuple(sorted(set(f.vertices))) not in inner]
        if self.mode is Mode.FINITE and len(outer) == 1:
            graph = DimerGraph(black, white, edges, rotation, outer[0], self.name)
        return graph

    def to_dict(self) -> dict:
        data = self.to_dimer_graph().to_dict()
        data["name"] = self.name
        data["mode"] = self.mode.value
        data["vertex_ids"] = list(self.vertex_ids)
        data["positions"] = {vid: [float(z.real), float(z.imag)] for vid, z in zip(self.vertex_ids, self.positions)}
        data["faces"] = [
            {"id": f.id, "color": f.color.value, "cycle": [self.vertex_ids[v] for v in f.cycle]}
            for f in self.faces
        ]
        return data


def tembedding_from_graph(graph: DimerGraph, positions: Dict[str, complex],
                          mode: Mode = Mode.FINITE) -> TEmbedding:
    """Attach positions to the augmented dual of a dimer graph."""
    dual = build_augmented_dual(graph, graph.v_out if mode is Mode.FINITE else None)
    missing = [v for v in dual.vertices if v not in positions]
    if missing:
        raise EmbeddingError("missing_position", f"{len(missing)} dual vertices have no position", missing[0])
    index = {vid: i for i, vid in enumerate(dual.vertices)}
    faces = []
    for v in graph.vertices:
        color = Color.BLACK if graph.color(v) == "black" else Color.WHITE
        faces.append(TFace(v, color, tuple(index[d] for d in dual.faces[v])))
    return TEmbedding([positions[v] for v in dual.vertices], faces, dual.vertices, mode, graph.name)


def validate_tembedding(te: TEmbedding, mode: Optional[Mode] = None,
                        paranoid: bool = False) -> DiagnosticsReport:
    """Check convexity, orientation, coloring and the angle condition.

    Args:
        te: The embedding to check
        mode: Overrides te.mode; in finite mode boundary vertices are exempt
        paranoid: Also run the global segment-intersection check

    Returns:
        DiagnosticsReport; details["angle_residuals"] maps vertex index to |Σθ_black − π|
    """
    mode = mode or te.mode
    report = DiagnosticsReport(subject=f"t-embedding {te.name}")
    z = te.positions

    for fi, f in enumerate(te.faces):
        pts = z[list(f.cycle)]
        scale = float(np.max(np.abs(np.roll(pts, -1) - pts))) ** 2 if len(pts) else 0.0
        if len(pts) < 3:
            report.add("degenerate", f.id, f"face {f.id} has {len(pts)} vertices")
            continue
        if te.areas[fi] <= CONVEXITY_TOL * scale:
            report.add("orientation", f.id, f"face {f.id} is not positively oriented (area {te.areas[fi]:.3e})",
                       value=float(te.areas[fi]))
        d_in = pts - np.roll(pts, 1)
        d_out = np.roll(pts, -1) - pts
        cross = (np.conj(d_in) * d_out).imag
        if np.any(cross < -CONVEXITY_TOL * scale):
            report.add("convexity", f.id, f"face {f.id} is not convex", value=float(cross.min()))

    for e in te.g_edges:
        if te.faces[e.b].color is te.faces[e.w].color:
            report.add("coloring", te.faces[e.b].id, "adjacent faces share a color")
    for (u, v), fi in te.half_edges.items():
        g = te.half_edges.get((v, u))
        if g is not None and te.faces[g].color is te.faces[fi].color:
            report.add("coloring", te.faces[fi].id,
                       f"faces {te.faces[fi].id} and {te.faces[g].id} share a color across an edge")
            break

    residuals: Dict[int, float] = {}
    for v in range(te.n_vertices):
        star, closed = te.vertex_star(v)
        if not star:
            continue
        if v in te.boundary_vertices or not closed:
            if mode is Mode.FINITE:
                report.add("exempt", te.vertex_ids[v], "boundary vertex exempt from the angle condition",
                           severity=Severity.INFO)
            else:
                report.add("patch_boundary", te.vertex_ids[v], "vertex on the edge of a whole-plane patch",
                           severity=Severity.WARNING)
            continue
        black_sum = sum(te.sector_angle(fi, v) for fi in star if te.faces[fi].color is Color.BLACK)
        white_sum = sum(te.sector_angle(fi, v) for fi in star if te.faces[fi].color is Color.WHITE)
        res = max(abs(black_sum - np.pi), abs(white_sum - np.pi))
        residuals[v] = abs(black_sum - np.pi)
        if res > ANGLE_TOL * len(star):
            report.add("angle", te.vertex_ids[v],
                       f"angle condition fails at {te.vertex_ids[v]}: black {black_sum:.12f}, white {white_sum:.12f}",
                       value=float(res))

    if paranoid:
        for a, b in find_overlaps(te):
            report.add("overlap", f"{te.vertex_ids[a[0]]}-{te.vertex_ids[a[1]]}",
                       f"edge crosses {te.vertex_ids[b[0]]}-{te.vertex_ids[b[1]]}")

    report.details["angle_residuals"] = residuals
    report.metrics["max_angle_residual"] = max(residuals.values()) if residuals else 0.0
    report.metrics["n_faces"] = float(len(te.faces))
    report.metrics["n_interior_vertices"] = float(len(residuals))
    logger.info(
        f"Validated {te.name}: {len(report.errors)} errors, "
        f"max angle residual {report.metrics['max_angle_residual']:.3e}"
    )
    return report


def find_overlaps(te: TEmbedding) -> List[Tuple[Tuple[int, int], Tuple[int, int]]]:
    """Global check for properly crossing edges of T."""
    segs = sorted({(min(u, v), max(u, v)) for (u, v) in te.half_edges})
    if not segs:
        return []
    z = te.positions
    a = np.array([z[u] for u, _ in segs])
    b = np.array([z[v] for _, v in segs])
    mid = (a + b) / 2
    radius = float(np.max(np.abs(b - a)))
    tree = cKDTree(np.column_stack([mid.real, mid.imag]))
    out = []
    for i, j in sorted(tree.query_pairs(radius + 1e-12)):
        if set(segs[i]) & set(segs[j]):
            continue
        if _segments_cross(a[i], b[i], a[j], b[j]):
            out.append((segs[i], segs[j]))
    return out


def _segments_cross(p1: complex, p2: complex, q1: complex, q2: complex) -> bool:
    def orient(a, b, c):
        return ((b - a).conjugate() * (c - a)).imag

    d1 = orient(q1, q2, p1)
    d2 = orient(q1, q2, p2)
    d3 = orient(p1, p2, q1)
    d4 = orient(p1, p2, q2)
    tol = 1e-12 * max(abs(p2 - p1), abs(q2 - q1)) ** 2
    return (d1 * d2 < -tol) and (d3 * d4 < -tol)
