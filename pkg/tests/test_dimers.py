"""Tests for the coupling function, perfect matchings, height correlations and the GFF reference."""
import numpy as np
import pytest

from tembed.core.errors import DimerError
from tembed.dimers.gff import Domain, gff_correlation, gff_reference, green_function, hausdorff_distance, pairings
from tembed.dimers.height import (
    absolute_h2,
    anchor_sensitivity,
    boundary_anchor,
    height_correlations,
    height_difference,
    height_function,
)
from tembed.dimers.inverse import invert_kasteleyn
from tembed.dimers.matchings import (
    check_perfect,
    edge_probabilities,
    enumerate_matchings,
    matching_pairs,
    matching_probability,
    sample_matching,
)
from tembed.embedding.kasteleyn import kasteleyn_matrix


@pytest.fixture(scope="module")
def square_coupling(square4):
    return invert_kasteleyn(kasteleyn_matrix(square4.te))


@pytest.fixture(scope="module")
def square_matchings(square4):
    return enumerate_matchings(square4.te.to_dimer_graph())


def test_inverse_is_accurate(square_coupling, honeycomb4):
    assert square_coupling.residual < 1e-10
    assert np.allclose(square_coupling.row_identity(), 1.0)
    cm = invert_kasteleyn(kasteleyn_matrix(honeycomb4.te))
    assert cm.residual < 1e-10


def test_four_by_four_grid_has_36_matchings(square_matchings):
    assert len(square_matchings.matchings) == 36
    assert square_matchings.Z == pytest.approx(36.0)
    assert square_matchings.expectation(lambda m: 1.0) == pytest.approx(1.0)
    assert square_matchings.expectation(lambda m: len(m.edges)) == pytest.approx(8.0)


def test_edge_probabilities_match_enumeration(square4, square_coupling, square_matchings):
    te = square4.te
    probs = edge_probabilities(te, square_coupling)
    for e in te.g_edges:
        assert probs[e.index] == pytest.approx(square_matchings.probability([e.index]), abs=1e-10)
    # every face is covered exactly once
    for f in range(len(te.faces)):
        assert sum(probs[e.index] for e in te.g_edges if f in (e.b, e.w)) == pytest.approx(1.0)


def test_joint_probability_matches_enumeration(square4, square_coupling, square_matchings):
    te = square4.te
    edges = next(iter(square_matchings.matchings)).edges
    pair = sorted(edges)[:2]
    assert matching_probability(te, square_coupling, pair) == pytest.approx(
        square_matchings.probability(pair), abs=1e-10)
    assert matching_probability(te, square_coupling, []) == 1.0
    assert matching_probability(te, square_coupling, edges) == pytest.approx(1 / 36, abs=1e-10)


def test_joint_probability_rejects_touching_edges(square4, square_coupling):
    te = square4.te
    b = te.g_edges[0].b
    touching = [e.index for e in te.g_edges if e.b == b][:2]
    with pytest.raises(DimerError) as exc:
        matching_probability(te, square_coupling, touching)
    assert exc.value.error_type == "overlapping"


def test_enumeration_size_limit(honeycomb4):
    graph = honeycomb4.te.to_dimer_graph()
    if len(graph.edges) <= 24:
        pytest.skip("graph is small enough to enumerate")
    with pytest.raises(DimerError) as exc:
        enumerate_matchings(graph)
    assert exc.value.error_type == "too_large"


def test_sample_matching_is_perfect_and_seeded(square4, square_coupling):
    te = square4.te
    m = sample_matching(te, square_coupling, seed=9)
    assert check_perfect(te, m.edges) == m.edges
    assert m.weight == pytest.approx(1.0)
    assert sample_matching(te, square_coupling, seed=9) == m
    assert len(matching_pairs(te, m)) == len(te.faces) // 2


def test_sampled_edge_frequencies(square4, square_coupling):
    te = square4.te
    probs = edge_probabilities(te, square_coupling)
    counts = np.zeros(len(te.g_edges))
    n = 300
    for seed in range(n):
        for e in sample_matching(te, square_coupling, seed=seed).edges:
            counts[e] += 1
    # four standard errors of a Bernoulli mean at n = 300 is below 0.12
    assert np.max(np.abs(counts / n - probs)) < 0.12


def test_check_perfect_rejects_partial_covers(square4):
    with pytest.raises(DimerError) as exc:
        check_perfect(square4.te, [0])
    assert exc.value.error_type == "not_perfect"


def test_height_function_is_flat_on_the_boundary(square4, square_matchings):
    te = square4.te
    ms = square_matchings.matchings
    same = height_function(te, ms[0].edges, ms[0].edges)
    assert not same.h.any()
    hf = height_function(te, ms[-1].edges, ms[0].edges)
    assert all(hf.h[v] == 0 for v in te.boundary_vertices)
    assert hf.to_dict(te)["basepoint"] == te.vertex_ids[min(te.boundary_vertices)]
    for f in range(len(te.faces)):
        for u, v in te.faces[f].sides():
            assert height_difference(te, hf, [u, v]) == hf.h[v] - hf.h[u]


def test_height_variance_matches_enumeration(square4, square_coupling, square_matchings):
    te = square4.te
    v = square4.data.vertex[(2, 2)]
    a = boundary_anchor(te, v)
    ref = square_matchings.matchings[0].edges
    heights = []
    weights = []
    for m in square_matchings.matchings:
        hf = height_function(te, m.edges, ref)
        heights.append(hf.h[v] - hf.h[a])
        weights.append(m.weight / square_matchings.Z)
    heights, weights = np.array(heights, dtype=float), np.array(weights)
    mean = float(weights @ heights)
    variance = float(weights @ (heights - mean) ** 2)
    result = height_correlations(te, square_coupling, [v, v], [a, a])
    assert result.value == pytest.approx(variance, abs=1e-8)
    assert 0 < result.n_repeated < result.n_tuples
    assert absolute_h2(te, square_coupling, [v], a)[0, 0] == pytest.approx(variance, abs=1e-8)


def test_boundary_anchors_are_interchangeable(square4, square_coupling):
    te = square4.te
    points = [square4.data.vertex[(2, 2)], square4.data.vertex[(1, 2)]]
    corners = (square4.data.vertex[(0, 0)], square4.data.vertex[(4, 4)])
    assert anchor_sensitivity(te, square_coupling, points, corners) < 1e-9


def test_height_correlation_limits(square4, square_coupling):
    te = square4.te
    v = te.interior_vertices[0]
    with pytest.raises(DimerError) as exc:
        height_correlations(te, square_coupling, [v] * 7, [v] * 7)
    assert exc.value.error_type == "too_many_points"
    with pytest.raises(DimerError) as exc:
        height_correlations(te, square_coupling, [v, v], [v])
    assert exc.value.error_type == "bad_anchors"


def test_pairings():
    assert list(pairings([])) == [[]]
    assert len(list(pairings(range(4)))) == 3
    assert len(list(pairings(range(6)))) == 15


def test_disk_green_function():
    disk = Domain.parse("disk")
    assert green_function(disk, 0, 0.5) == pytest.approx(np.log(2) / (2 * np.pi))
    z, w = 0.2 + 0.1j, -0.3 + 0.4j
    assert green_function(disk, z, w) == pytest.approx(green_function(disk, w, z))
    assert green_function(disk, z, 0.999999) < 1e-5


def test_square_green_function_is_symmetric():
    square = Domain.parse("square", 0j, 2.0)
    z, w = 0.3 + 0.1j, -0.2 + 0.5j
    g = green_function(square, z, w)
    assert g > 0
    assert green_function(square, w, z) == pytest.approx(g, abs=1e-10)
    # quarter turns and reflections map the square onto itself
    assert green_function(square, 1j * z, 1j * w) == pytest.approx(g, abs=1e-9)
    assert green_function(square, np.conj(z), np.conj(w)) == pytest.approx(g, abs=1e-9)
    assert green_function(square, z, 0.999999) < 1e-5


def test_green_function_rejects_bad_points():
    disk = Domain.parse("disk")
    for z, w in [(0.1, 0.1), (0, 1.5)]:
        with pytest.raises(DimerError) as exc:
            green_function(disk, z, w)
        assert exc.value.error_type == "bad_point"
    with pytest.raises(DimerError) as exc:
        Domain.parse("triangle")
    assert exc.value.error_type == "bad_domain"
    with pytest.raises(DimerError):
        Domain.parse("disk", size=0.0)


def test_gff_correlations():
    disk = Domain.parse("disk")
    points = [0.1, 0.3j, -0.4, 0.2 - 0.5j]
    assert gff_correlation(disk, points[:3]) == 0.0

    def G(i, j):
        return green_function(disk, points[i], points[j])

    wick = G(0, 1) * G(2, 3) + G(0, 2) * G(1, 3) + G(0, 3) * G(1, 2)
    assert gff_correlation(disk, points) == pytest.approx(wick)
    assert gff_reference(disk, points[:2]) == pytest.approx(G(0, 1) / np.pi)


def test_domain_boundary_and_hausdorff_distance():
    square = Domain.parse("square", 1 + 1j, 2.0)
    pts = square.boundary_points(8)
    assert np.allclose(pts, [2, 2 + 1j, 2 + 2j, 1 + 2j, 2j, 1j, 0, 1])
    assert all(abs(square.distance_to_boundary(p)) < 1e-12 for p in pts)
    assert hausdorff_distance(square, pts, n=8) == 0.0
    disk = Domain.parse("disk")
    assert hausdorff_distance(disk, 1.1 * disk.boundary_points(64), n=64) == pytest.approx(0.1)
