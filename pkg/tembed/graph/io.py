"""JSON loading and saving of dimer graphs and t-embeddings."""
import json
import logging
from pathlib import Path
from typing import Union

from tembed.core.errors import GraphError
from tembed.core.models import Color, Mode
from tembed.graph.dimer_graph import DimerGraph, Edge

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def graph_from_dict(data: dict, name: str = "graph") -> DimerGraph:
    """Build a DimerGraph from the JSON graph format.

    Edge ids are the list positions unless an explicit "id" is given.
    """
    try:
        black = tuple(str(v) for v in data["black"])
        white = tuple(str(v) for v in data["white"])
        raw_edges = data["edges"]
        raw_rotation = data["rotation"]
    except KeyError as e:
        raise GraphError("bad_format", f"graph JSON is missing the {e.args[0]!r} field")

    edges = []
    for i, item in enumerate(raw_edges):
        eid = int(item.get("id", i))
        if eid != i:
            raise GraphError("bad_format", f"edge ids must be 0..n-1 in order, got {eid} at position {i}")
        edges.append(Edge(eid, str(item["b"]), str(item["w"]), float(item.get("x", 1.0))))
    rotation = {str(v): tuple(int(e) for e in r) for v, r in raw_rotation.items()}
    v_out = data.get("v_out")
    return DimerGraph(black, white, tuple(edges), rotation, v_out, data.get("name", name))


def load_graph(path: PathLike) -> DimerGraph:
    path = Path(path)
    with open(path) as f:
        data = json.load(f)
    graph = graph_from_dict(data, name=path.stem)
    logger.info(f"Loaded graph {graph.name}: {len(graph.black)}+{len(graph.white)} vertices, {len(graph.edges)} edges")
    return graph


def tembedding_from_dict(data: dict, name: str = "t-embedding"):
    """Build a TEmbedding from JSON.

    Two layouts are accepted: the graph format plus "positions" keyed by
    dual-vertex id, or explicit "faces" with ccw "cycle" lists (the form
    written by TEmbedding.to_dict).
    """
    from tembed.embedding.tembedding import TEmbedding, TFace, tembedding_from_graph

    if "positions" not in data:
        raise GraphError("bad_format", "t-embedding JSON needs a \"positions\" field")
    positions = {str(k): complex(v[0], v[1]) for k, v in data["positions"].items()}
    mode = Mode(data.get("mode", Mode.FINITE.value))
    name = data.get("name", name)

    if "faces" in data:
        vertex_ids = list(data.get("vertex_ids", positions.keys()))
        index = {vid: i for i, vid in enumerate(vertex_ids)}
        faces = []
        for item in data["faces"]:
            try:
                cycle = tuple(index[str(v)] for v in item["cycle"])
            except KeyError as e:
                raise GraphError("bad_format", f"face {item.get('id')} uses unknown vertex {e.args[0]}")
            faces.append(TFace(str(item["id"]), Color(item["color"]), cycle))
        return TEmbedding([positions[v] for v in vertex_ids], faces, vertex_ids, mode, name)

    graph = graph_from_dict(data, name=name)
    return tembedding_from_graph(graph, positions, mode)


def load_tembedding(path: PathLike):
    path = Path(path)
    with open(path) as f:
        data = json.load(f)
    te = tembedding_from_dict(data, name=path.stem)
    logger.info(f"Loaded t-embedding {te.name}: {len(te.faces)} faces, {te.n_vertices} vertices")
    return te


def save_json(data: dict, path: PathLike):
    """Write JSON with sorted keys so repeated runs are byte-identical."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(data, f, indent=2, sort_keys=True)
        f.write("\n")
