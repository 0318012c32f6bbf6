"""Tests for T-graphs, their random walks and the backward walk."""
import numpy as np
import pytest

from tembed.core.errors import WalkError
from tembed.core.models import Color, Flavor
from tembed.embedding.splitting import build_splitting
from tembed.lattices.manager import regular_lattices
from tembed.holomorphy.functions import constant_function
from tembed.walks.backward import backward_structure, check_backward_identity
from tembed.walks.harmonic import check_harmonic, direction_gamma
from tembed.walks.rates import Chain, invariant_measure, segment_rates, walk_rates
from tembed.walks.simulate import (
    concentration_bound,
    exit_distribution,
    hit_before_exit,
    segment_path_law,
    simulate_ensemble,
    simulate_walk,
)
from tembed.walks.tgraph import build_tgraph, tgraph_map

ALPHA = np.exp(0.1j)


@pytest.fixture(scope="module")
def honeycomb_tgraph(honeycomb4):
    return build_tgraph(honeycomb4.te, honeycomb4.eta, honeycomb4.om, ALPHA)


@pytest.fixture(scope="module")
def honeycomb_rates(honeycomb_tgraph):
    return walk_rates(honeycomb_tgraph)


def line_chain() -> Chain:
    """0 <- 1 -> 2 with equal rates; 0 and 2 absorb."""
    return Chain(
        positions=np.array([0, 1, 2], dtype=complex),
        targets=[np.empty(0, dtype=int), np.array([0, 2]), np.empty(0, dtype=int)],
        rates=[np.empty(0), np.array([1.0, 1.0]), np.empty(0)],
        absorbing=np.array([True, False, True]),
    )


def test_tgraph_structure(honeycomb4, honeycomb_tgraph):
    tg = honeycomb_tgraph
    te = honeycomb4.te
    assert tg.flat_color is Color.BLACK
    assert not tg.degenerate
    assert len(tg.segments) == len(te.black)
    assert tg.sinks == {int(tg.vertex_point[v]) for v in te.boundary_vertices}
    for p in range(tg.n_points):
        assert p in tg.sinks or p in tg.owner
    assert np.allclose(tg.images, te.positions + ALPHA ** 2 * honeycomb4.om.values)


def test_white_flat_map(honeycomb4):
    images = tgraph_map(honeycomb4.te, honeycomb4.om, ALPHA, Flavor.WHITE_FLAT)
    assert np.allclose(images, honeycomb4.te.positions + np.conj(ALPHA ** 2 * honeycomb4.om.values))


def test_splitting_must_match_flavor(square4):
    white = build_splitting(square4.te, Color.WHITE)
    with pytest.raises(WalkError) as exc:
        build_tgraph(square4.te, square4.eta, square4.om, ALPHA, Flavor.BLACK_FLAT, splitting=white)
    assert exc.value.error_type == "bad_splitting"


def test_segment_rates():
    q_minus, q_plus = segment_rates(1.0, 0.0, 3.0)
    assert q_minus == pytest.approx(1 / 3)
    assert q_plus == pytest.approx(1 / 6)
    # no drift along the segment
    assert q_minus * (0.0 - 1.0) + q_plus * (3.0 - 1.0) == pytest.approx(0.0)


def test_walk_is_a_martingale(honeycomb_tgraph, honeycomb_rates):
    wr = honeycomb_rates
    assert wr.kinds.count("segment") == len(set(honeycomb_tgraph.owner) - honeycomb_tgraph.sinks)
    report = check_harmonic(honeycomb_tgraph, wr, honeycomb_tgraph.points)
    assert report.ok
    assert report.metrics["max_residual"] < 1e-9


def test_tangent_rates_agree(honeycomb_rates):
    report = honeycomb_rates.tangent_report
    assert report.metrics["n_checked"] > 0
    assert report.ok


def test_area_measure_is_stationary_in_the_bulk():
    bundle = regular_lattices("honeycomb", 10)
    tg = build_tgraph(bundle.te, bundle.eta, bundle.om, ALPHA)
    measure = invariant_measure(tg, walk_rates(tg))
    assert np.any(measure.deep)
    assert measure.max_deep_residual < 1e-9
    assert np.all(measure.mu >= 0)


def test_collapsed_faces_on_the_square_grid(square4):
    tg = build_tgraph(square4.te, square4.eta, square4.om, 1.0)
    assert tg.degenerate
    inner = {p: r for p, r in tg.degenerate.items() if p not in tg.sinks}
    assert inner
    for record in inner.values():
        assert record.label.startswith("s")
        assert sum(record.masses) == pytest.approx(1.0)
    wr = walk_rates(tg)
    assert "degenerate" in wr.kinds
    assert set(wr.masses) == set(inner)


def test_direction_gamma(honeycomb4):
    black = build_tgraph(honeycomb4.te, honeycomb4.eta, honeycomb4.om, ALPHA)
    white = build_tgraph(honeycomb4.te, honeycomb4.eta, honeycomb4.om, ALPHA, Flavor.WHITE_FLAT)
    assert direction_gamma(black) == pytest.approx(ALPHA)
    assert direction_gamma(white) == pytest.approx(np.conj(ALPHA))


def test_simulate_walk_is_reproducible(honeycomb_tgraph, honeycomb_rates):
    chain = honeycomb_rates.chain
    start = min(set(honeycomb_tgraph.owner) - honeycomb_tgraph.sinks)
    a = simulate_walk(chain, start, horizon=5.0, seed=7, walker=2)
    b = simulate_walk(chain, start, horizon=5.0, seed=7, walker=2)
    assert np.array_equal(a.times, b.times)
    assert np.array_equal(a.states, b.states)
    assert a.times[-1] <= 5.0
    if a.absorbed:
        assert chain.absorbing[a.exit_state]
    assert len(a.to_rows()) == len(a.times)


def test_simulate_walk_rejects_bad_horizon(honeycomb_rates):
    with pytest.raises(WalkError) as exc:
        simulate_walk(honeycomb_rates.chain, 0, horizon=0.0)
    assert exc.value.error_type == "bad_horizon"


def test_unbounded_walk_is_absorbed(honeycomb_tgraph, honeycomb_rates):
    start = min(set(honeycomb_tgraph.owner) - honeycomb_tgraph.sinks)
    traj = simulate_walk(honeycomb_rates.chain, start, seed=1)
    assert traj.absorbed
    assert traj.exit_state in honeycomb_tgraph.sinks


def test_simulate_ensemble(honeycomb_tgraph, honeycomb_rates):
    chain = honeycomb_rates.chain
    start = min(set(honeycomb_tgraph.owner) - honeycomb_tgraph.sinks)
    a = simulate_ensemble(chain, start, [0.5, 2.0], n_walks=50, seed=11)
    b = simulate_ensemble(chain, start, [2.0, 0.5], n_walks=50, seed=11)
    assert a.positions.shape == (2, 50)
    assert np.array_equal(a.positions, b.positions)
    assert np.all(a.max_deviation[1] >= a.max_deviation[0])
    with pytest.raises(WalkError):
        simulate_ensemble(chain, start, [0.0], n_walks=5)


def test_exit_distribution_on_a_line():
    assert exit_distribution(line_chain(), [1]) == {1: {0: 0.5, 2: 0.5}}


def test_hit_before_exit():
    chain = line_chain()
    target = np.array([False, False, True])
    region = np.array([True, True, True])
    hits = hit_before_exit(chain, [2, 0], target, region)
    assert hits.tolist() == [True, False]
    # a walker at 1 reaches 2 about half the time
    hits = hit_before_exit(chain, [1] * 400, target, region, seed=3)
    assert 0.35 < hits.mean() < 0.65


def test_concentration_bound():
    assert concentration_bound(0.0, 1.0, 0.1) == pytest.approx(4.0)
    assert concentration_bound(3.0, 1.0, 0.1) < concentration_bound(2.0, 1.0, 0.1)


def test_segment_path_law_is_a_distribution(honeycomb_tgraph, honeycomb_rates):
    start = min(set(honeycomb_tgraph.owner) - honeycomb_tgraph.sinks)
    law = segment_path_law(honeycomb_tgraph, honeycomb_rates, start, 3)
    assert sum(law.values()) == pytest.approx(1.0)
    assert all(path[0] == honeycomb_tgraph.label(start) for path in law)


def test_backward_walk_needs_white_flat(honeycomb_tgraph):
    with pytest.raises(WalkError) as exc:
        backward_structure(honeycomb_tgraph)
    assert exc.value.error_type == "bad_flavor"


def test_backward_probabilities(honeycomb4):
    tg = build_tgraph(honeycomb4.te, honeycomb4.eta, honeycomb4.om, ALPHA, Flavor.WHITE_FLAT)
    bs = backward_structure(tg)
    assert bs.owner_of
    for v, row in bs.probabilities.items():
        assert sum(row.values()) == pytest.approx(1.0)
        assert all(p >= 0 for p in row.values())
    chain = bs.chain()
    assert chain.absorbing[-1]


def test_backward_identity(honeycomb4):
    te, eta = honeycomb4.te, honeycomb4.eta
    tg = build_tgraph(te, eta, honeycomb4.om, ALPHA, Flavor.WHITE_FLAT)
    bs = backward_structure(tg)
    F = constant_function(te, eta, 0.3 + 0.7j)
    report = check_backward_identity(bs, F)
    assert report.ok
    assert report.metrics["max_residual"] < 1e-9
    # a single off value breaks the identity at the vertices around that face
    inc = next(iter(bs.increments.values()))
    w = inc.whites[int(np.argmax(np.abs(inc.c)))][0]
    F.values = F.values.copy()
    F.values[w] += 1.0
    assert not check_backward_identity(bs, F).ok
