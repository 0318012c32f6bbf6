"""Augmented dual construction and dimer-graph validation."""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Set, Tuple

import networkx as nx

from tembed.core.errors import GraphError
from tembed.core.models import DiagnosticsReport, Severity
from tembed.graph.dimer_graph import DimerGraph

logger = logging.getLogger(__name__)


def boundary_vertex_id(edge_id: int) -> str:
    """Id of the boundary dual vertex standing in for v_out next to an edge."""
    return f"c{edge_id}"


@dataclass(frozen=True)
class DualEdge:
    """Dual edge bw*, oriented so that b lies on its right."""
    primal: int
    tail: str
    head: str


@dataclass
class DualStructure:
    """Dual G* of a dimer graph, augmented at v_out in the finite case."""
    vertices: List[str]
    edges: List[DualEdge]
    faces: Dict[str, List[str]]  # G vertex -> ccw cycle of dual vertices
    boundary_cycle: List[str] = field(default_factory=list)
    boundary_black: Set[str] = field(default_factory=set)
    boundary_white: Set[str] = field(default_factory=set)
    v_out: Optional[str] = None

    @property
    def interior_vertices(self) -> List[str]:
        on_boundary = set(self.boundary_cycle)
        return [v for v in self.vertices if v not in on_boundary]

    def euler_characteristic(self) -> int:
        """V − E + F of the dual, counting the outer region once."""
        n_edges = len(self.edges) + len(self.boundary_cycle)
        n_faces = len(self.faces) + (1 if self.boundary_cycle else 0)
        return len(self.vertices) - n_edges + n_faces

    def to_dict(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "edges": [{"primal": e.primal, "tail": e.tail, "head": e.head} for e in self.edges],
            "faces": {k: list(v) for k, v in self.faces.items()},
            "boundary_cycle": list(self.boundary_cycle),
            "boundary_black": sorted(self.boundary_black),
            "boundary_white": sorted(self.boundary_white),
            "v_out": self.v_out,
        }


def build_augmented_dual(graph: DimerGraph, v_out: Optional[str] = None) -> DualStructure:
    """Build the dual of G, replacing v_out by a boundary cycle.

    Args:
        graph: Valid planar bipartite graph
        v_out: Face id of the outer face, or None for the whole-plane mode

    Returns:
        DualStructure with faces listed counterclockwise around each vertex of G
    """
    if graph.euler_characteristic() != 2:
        raise GraphError(
            "non_planar",
            f"rotation system of {graph.name} has V-E+F = {graph.euler_characteristic()}, expected 2",
        )
    face_ids = {f.id for f in graph.faces}
    if v_out is not None and v_out not in face_ids:
        raise GraphError("bad_v_out", f"{v_out} is not a face of {graph.name}")

    face_of = graph.face_of_dart
    boundary_edges: Set[int] = set()
    boundary_cycle: List[str] = []
    if v_out is not None:
        outer = graph.face(v_out)
        for eid, _ in outer.darts:
            if eid in boundary_edges:
                raise GraphError("bridge", f"edge {eid} borders v_out on both sides", str(eid))
            boundary_edges.add(eid)
            boundary_cycle.append(boundary_vertex_id(eid))

    def side(eid: int, tail: str) -> str:
        f = face_of[(eid, tail)]
        return boundary_vertex_id(eid) if f == v_out else f

    edges = []
    for e in graph.edges:
        # b on the right: tail is the face left of the dart b -> w
        edges.append(DualEdge(e.id, side(e.id, e.b), side(e.id, e.w)))

    faces: Dict[str, List[str]] = {}
    for v in graph.vertices:
        rot = graph.rotation[v]
        cycle: List[str] = []
        for i, eid in enumerate(rot):
            f = face_of[(eid, v)]
            if f != v_out:
                cycle.append(f)
            else:
                cycle.append(boundary_vertex_id(eid))
                cycle.append(boundary_vertex_id(rot[(i + 1) % len(rot)]))
        faces[v] = cycle

    vertices = sorted(fid for fid in face_ids if fid != v_out) + boundary_cycle
    boundary_black = set()
    boundary_white = set()
    if v_out is not None:
        for _, tail in graph.face(v_out).darts:
            (boundary_black if graph.color(tail) == "black" else boundary_white).add(tail)

    dual = DualStructure(vertices, edges, faces, boundary_cycle, boundary_black, boundary_white, v_out)
    logger.debug(
        f"Dual of {graph.name}: {len(vertices)} vertices, {len(edges)} edges, "
        f"boundary cycle {len(boundary_cycle)}"
    )
    return dual


def validate_dimer_graph(graph: DimerGraph) -> DiagnosticsReport:
    """Check bipartiteness, degrees, weights and planarity of a dimer graph.

    Never raises; an empty report means the graph is valid.
    """
    report = DiagnosticsReport(subject=f"dimer graph {graph.name}")
    known = set(graph.vertices)
    black = set(graph.black)
    white = set(graph.white)

    for v in black & white:
        report.add("bipartite", v, f"vertex {v} is listed as both black and white")

    nxg = nx.MultiGraph()
    nxg.add_nodes_from(known)
    for e in graph.edges:
        if e.b not in known or e.w not in known:
            report.add("unknown_vertex", f"edge {e.id}", f"edge {e.id} joins unknown vertices {e.b}, {e.w}")
            continue
        if e.b not in black or e.w not in white:
            report.add("bipartite", f"edge {e.id}",
                       f"edge {e.id} joins {graph.color(e.b)} {e.b} to {graph.color(e.w)} {e.w}")
        if not e.x > 0:
            report.add("weight", f"edge {e.id}", f"edge {e.id} has nonpositive weight {e.x}", value=e.x)
        nxg.add_edge(e.b, e.w, key=e.id)

    if not nx.is_bipartite(nxg):
        try:
            cycle = nx.find_cycle(nx.Graph(nxg))
            where = "-".join(str(a) for a, _ in cycle)
        except nx.NetworkXNoCycle:
            where = "graph"
        report.add("bipartite", where, "adjacency contains an odd cycle")
    if known and not nx.is_connected(nxg):
        report.add("connected", "graph", "graph is not connected")

    incident: Dict[str, Set[int]] = {v: set() for v in known}
    for e in graph.edges:
        incident.setdefault(e.b, set()).add(e.id)
        incident.setdefault(e.w, set()).add(e.id)
    for v in sorted(known):
        rot = graph.rotation.get(v, ())
        if set(rot) != incident[v] or len(rot) != len(set(rot)):
            report.add("rotation", v, f"rotation at {v} does not list its incident edges exactly once")
        if len(incident[v]) < 3:
            report.add("degree", v,
                       f"vertex {v} has degree {len(incident[v])}; vertices of G should have degree at least three",
                       severity=Severity.WARNING, value=float(len(incident[v])))

    if not report.of_kind("rotation") and not report.of_kind("unknown_vertex"):
        try:
            chi = graph.euler_characteristic()
            if chi != 2:
                report.add("planarity", "graph", f"Euler characteristic V-E+F = {chi}, expected 2", value=float(chi))
        except GraphError as e:
            report.add("planarity", e.location or "graph", e.message)
        if graph.v_out is not None and graph.v_out not in {f.id for f in graph.faces}:
            report.add("v_out", graph.v_out, f"v_out {graph.v_out} is not a face")

    if report.violations:
        logger.info(f"Validation of {graph.name}: {len(report.errors)} errors, {len(report.warnings)} warnings")
    return report
