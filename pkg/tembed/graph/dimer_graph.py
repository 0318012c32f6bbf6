"""Abstract bipartite planar dimer graphs.

A DimerGraph is a rotation system (combinatorial map): for every vertex
the incident edge ids in counterclockwise order. Faces are traced from
the rotation, so no coordinates are needed.
"""
import logging
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Dict, List, Optional, Tuple

from tembed.core.errors import GraphError

logger = logging.getLogger(__name__)

Dart = Tuple[int, str]  # (edge id, tail vertex)


@dataclass(frozen=True)
class Edge:
    """An edge joining a black vertex to a white vertex."""
    id: int
    b: str
    w: str
    x: float = 1.0  # positive weight

    def other(self, v: str) -> str:
        if v == self.b:
            return self.w
        if v == self.w:
            return self.b
        raise GraphError("not_incident", f"vertex {v} is not an end of edge {self.id}")

    def to_dict(self) -> dict:
        return {"id": self.id, "b": self.b, "w": self.w, "x": self.x}


@dataclass(frozen=True)
class GraphFace:
    """A face of the embedded graph, traced with the face on the left."""
    id: str
    darts: Tuple[Dart, ...]

    @property
    def vertices(self) -> Tuple[str, ...]:
        return tuple(tail for _, tail in self.darts)

    @property
    def degree(self) -> int:
        return len(self.darts)


def minimal_rotation(cycle: Tuple[str, ...]) -> Tuple[str, ...]:
    """Lexicographically minimal rotation of a vertex cycle."""
    if not cycle:
        return cycle
    return min(tuple(cycle[i:] + cycle[:i]) for i in range(len(cycle)))


def face_id_for(cycle: Tuple[str, ...]) -> str:
    return "f(" + ",".join(minimal_rotation(tuple(cycle))) + ")"


@dataclass(frozen=True)
class DimerGraph:
    """Bipartite planar graph G = B ∪ W with weights and a rotation system."""
    black: Tuple[str, ...]
    white: Tuple[str, ...]
    edges: Tuple[Edge, ...]
    rotation: Dict[str, Tuple[int, ...]] = field(hash=False)
    v_out: Optional[str] = None  # face id of the outer face, if finite
    name: str = "graph"

    @property
    def vertices(self) -> Tuple[str, ...]:
        return self.black + self.white

    @cached_property
    def _color(self) -> Dict[str, str]:
        colors = {v: "black" for v in self.black}
        colors.update({v: "white" for v in self.white})
        return colors

    def color(self, v: str) -> str:
        try:
            return self._color[v]
        except KeyError:
            raise GraphError("unknown_vertex", f"unknown vertex {v}")

    def degree(self, v: str) -> int:
        return len(self.rotation.get(v, ()))

    def edge(self, eid: int) -> Edge:
        return self.edges[eid]

    @property
    def weights(self) -> Dict[int, float]:
        return {e.id: e.x for e in self.edges}

    def with_weights(self, weights: Dict[int, float]) -> "DimerGraph":
        edges = tuple(replace(e, x=float(weights[e.id])) for e in self.edges)
        return replace(self, edges=edges)

    def next_dart(self, dart: Dart) -> Dart:
        """Next dart along the face on the left of `dart`."""
        eid, tail = dart
        head = self.edges[eid].other(tail)
        rot = self.rotation[head]
        try:
            i = rot.index(eid)
        except ValueError:
            raise GraphError("non_planar", f"edge {eid} missing from rotation of {head}", head)
        return rot[i - 1], head

    @cached_property
    def faces(self) -> Tuple[GraphFace, ...]:
        """All faces, sorted by their deterministic id."""
        seen = set()
        faces = []
        for v in self.vertices:
            for eid in self.rotation.get(v, ()):
                start = (eid, v)
                if start in seen:
                    continue
                darts = []
                d = start
                while d not in seen:
                    seen.add(d)
                    darts.append(d)
                    d = self.next_dart(d)
                if d != start:
                    raise GraphError("non_planar", "face tracing did not close up", str(v))
                cycle = tuple(tail for _, tail in darts)
                # rotate darts so the face starts at its minimal rotation
                key = minimal_rotation(cycle)
                for i in range(len(cycle)):
                    if tuple(cycle[i:] + cycle[:i]) == key:
                        darts = darts[i:] + darts[:i]
                        break
                faces.append(GraphFace(face_id_for(cycle), tuple(darts)))
        faces.sort(key=lambda f: f.id)
        return tuple(faces)

    @cached_property
    def face_of_dart(self) -> Dict[Dart, str]:
        return {d: f.id for f in self.faces for d in f.darts}

    def face(self, face_id: str) -> GraphFace:
        for f in self.faces:
            if f.id == face_id:
                return f
        raise GraphError("unknown_face", f"{face_id} is not a face of {self.name}")

    def euler_characteristic(self) -> int:
        return len(self.vertices) - len(self.edges) + len(self.faces)

    def to_dict(self) -> dict:
        return {
            "black": list(self.black),
            "white": list(self.white),
            "edges": [e.to_dict() for e in self.edges],
            "rotation": {v: list(r) for v, r in self.rotation.items()},
            "v_out": self.v_out,
        }


def gauge_transform(weights: Dict[int, float], graph: DimerGraph,
                    g: Dict[str, float]) -> Dict[int, float]:
    """Gauge-transform edge weights: χ(bw) = g(b)·x(bw)·g(w).

    Args:
        weights: Weight per edge id
        graph: Graph giving the edge endpoints
        g: Positive value per vertex (missing vertices default to 1)

    Returns:
        New weight per edge id
    """
    for v, value in g.items():
        if not value > 0:
            raise GraphError("bad_gauge", f"gauge value at {v} must be positive, got {value}", v)
    return {
        e.id: g.get(e.b, 1.0) * weights[e.id] * g.get(e.w, 1.0)
        for e in graph.edges
    }
