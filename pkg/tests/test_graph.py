"""Tests for dimer graphs, augmented duals and the JSON loaders."""
import json

import numpy as np
import pytest

from tembed.core.errors import GraphError
from tembed.core.models import Severity
from tembed.graph.dimer_graph import face_id_for, gauge_transform, minimal_rotation
from tembed.graph.dual import build_augmented_dual, validate_dimer_graph
from tembed.graph.io import graph_from_dict, load_graph, load_tembedding, save_json, tembedding_from_dict


def test_minimal_rotation_is_stable():
    assert minimal_rotation(("w1", "b1", "w2", "b2")) == ("b1", "w2", "b2", "w1")
    assert face_id_for(("b2", "w1", "b1", "w2")) == face_id_for(("b1", "w2", "b2", "w1"))


def test_four_cycle_faces(four_cycle):
    graph = graph_from_dict(four_cycle)
    ids = [f.id for f in graph.faces]
    assert ids == ["f(b1,w1,b2,w2)", "f(b1,w2,b2,w1)"]
    assert graph.euler_characteristic() == 2


def test_four_cycle_augmented_dual(four_cycle):
    graph = graph_from_dict(four_cycle)
    dual = build_augmented_dual(graph, graph.v_out)
    assert len(dual.boundary_cycle) == graph.face(graph.v_out).degree == 4
    assert dual.interior_vertices == ["f(b1,w1,b2,w2)"]
    assert len(dual.edges) == 4
    assert dual.euler_characteristic() == 2
    # every vertex of G is drawn as a triangle: the inner face and two boundary vertices
    assert all(len(cycle) == 3 for cycle in dual.faces.values())
    assert dual.boundary_black == {"b1", "b2"}
    assert dual.boundary_white == {"w1", "w2"}


def test_dual_rejects_unknown_v_out(four_cycle):
    graph = graph_from_dict(four_cycle)
    with pytest.raises(GraphError) as exc:
        build_augmented_dual(graph, "f(nowhere)")
    assert exc.value.error_type == "bad_v_out"


def test_degree_two_vertices_warn_only(four_cycle):
    report = validate_dimer_graph(graph_from_dict(four_cycle))
    assert report.ok
    assert len(report.of_kind("degree")) == 4
    assert all(v.severity is Severity.WARNING for v in report.of_kind("degree"))


def test_odd_cycle_is_reported():
    data = {
        "black": ["a"],
        "white": ["b", "c"],
        "edges": [{"b": "a", "w": "b"}, {"b": "a", "w": "c"}, {"b": "b", "w": "c"}],
        "rotation": {"a": [0, 1], "b": [0, 2], "c": [1, 2]},
    }
    report = validate_dimer_graph(graph_from_dict(data))
    assert not report.ok
    assert report.of_kind("bipartite")


def test_nonpositive_weight_is_reported(four_cycle):
    four_cycle["edges"][2]["x"] = 0.0
    report = validate_dimer_graph(graph_from_dict(four_cycle))
    assert [v.location for v in report.of_kind("weight")] == ["edge 2"]


def test_graph_from_dict_rejects_missing_fields(four_cycle):
    del four_cycle["rotation"]
    with pytest.raises(GraphError) as exc:
        graph_from_dict(four_cycle)
    assert exc.value.error_type == "bad_format"


def test_gauge_transform(four_cycle):
    graph = graph_from_dict(four_cycle)
    weights = {0: 1.0, 1: 2.0, 2: 3.0, 3: 4.0}
    assert gauge_transform(weights, graph, {}) == weights
    out = gauge_transform(weights, graph, {"b1": 2.0, "w2": 0.5})
    assert out == {0: 2.0, 1: 2.0, 2: 1.5, 3: 4.0}
    with pytest.raises(GraphError):
        gauge_transform(weights, graph, {"b1": -1.0})
    regauged = graph.with_weights(out)
    assert regauged.weights == out
    assert regauged.rotation == graph.rotation


def test_dual_of_dual_matches_square_grid(square4):
    te = square4.te
    graph = te.to_dimer_graph()
    assert graph.v_out is not None
    assert graph.euler_characteristic() == 2
    assert len(graph.faces) - 1 == len(te.interior_vertices)
    dual = build_augmented_dual(graph, graph.v_out)
    assert len(dual.interior_vertices) == len(te.interior_vertices)
    assert validate_dimer_graph(graph).ok


def test_honeycomb_graph_is_valid(honeycomb4):
    graph = honeycomb4.te.to_dimer_graph()
    report = validate_dimer_graph(graph)
    assert report.ok
    assert not report.of_kind("bipartite")
    assert not report.of_kind("planarity")


def test_random_triangulation_euler(triangulation4):
    assert triangulation4.te.to_dimer_graph().euler_characteristic() == 2


def test_tembedding_json_round_trip(tmp_path, square4):
    te = square4.te
    path = tmp_path / "square.json"
    save_json(te.to_dict(), path)
    loaded = load_tembedding(path)
    assert loaded.vertex_ids == te.vertex_ids
    assert np.allclose(loaded.positions, te.positions)
    assert [f.cycle for f in loaded.faces] == [f.cycle for f in te.faces]
    assert [f.color for f in loaded.faces] == [f.color for f in te.faces]


def test_tembedding_from_graph_format(four_cycle, tmp_path):
    data = dict(four_cycle)
    data["positions"] = {
        "f(b1,w1,b2,w2)": [0.0, 0.0],
        "c0": [0.0, -1.0],
        "c1": [1.0, 0.0],
        "c2": [0.0, 1.0],
        "c3": [-1.0, 0.0],
    }
    path = tmp_path / "four_cycle.json"
    path.write_text(json.dumps(data))
    assert len(load_graph(path).edges) == 4
    te = tembedding_from_dict(data)
    assert len(te.faces) == 4
    assert te.interior_vertices == [te.vertex_ids.index("f(b1,w1,b2,w2)")]


def test_positions_are_required(four_cycle):
    with pytest.raises(GraphError):
        tembedding_from_dict(four_cycle)
