"""Tests for the variance, crossing and oscillation probes."""
import numpy as np
import pytest

from tembed.core.errors import ProbeError
from tembed.core.models import Flavor
from tembed.lattices.manager import regular_lattices
from tembed.probes.base import ProbeResult, central_point, proportion
from tembed.probes.crossing import Rectangle, mc_crossing_probe
from tembed.probes.oscillation import lipschitz_dichotomy, oscillation, oscillation_profile
from tembed.probes.variance import directional_variance, mc_variance_probe
from tembed.walks.backward import backward_structure
from tembed.walks.rates import walk_rates
from tembed.walks.tgraph import build_tgraph

ALPHA = np.exp(0.1j)


@pytest.fixture(scope="module")
def honeycomb10():
    bundle = regular_lattices("honeycomb", 10)
    tg = build_tgraph(bundle.te, bundle.eta, bundle.om, ALPHA)
    return bundle, tg, walk_rates(tg)


@pytest.fixture(scope="module")
def honeycomb16():
    return regular_lattices("honeycomb", 16)


def test_proportion():
    p, se = proportion(np.array([True, False, True, True]))
    assert p == 0.75
    assert se == pytest.approx(np.sqrt(0.75 * 0.25 / 4))
    p, se = proportion(np.array([], dtype=bool))
    assert np.isnan(p) and np.isnan(se)


def test_probe_result_serialization():
    res = ProbeResult("crossing", float("nan"), 0.0, 0, {"r": 2.0, "center": [0, 0]}, 3, ["below_scale"])
    assert not res.in_regime
    data = res.to_dict()
    assert data["estimate"] is None
    assert data["interval"] == [None, None]
    row = res.to_row()
    assert row["r"] == 2.0
    assert "center" not in row
    assert row["flags"] == "below_scale"
    ok = ProbeResult("variance", 1.0, 0.1)
    assert ok.interval == pytest.approx((0.7, 1.3))


def test_directional_variance():
    d = np.array([1, -1, 1j, -1j])
    assert directional_variance(d, 1.0).estimate == pytest.approx(2 / 3)
    assert directional_variance(d, 2j).estimate == pytest.approx(2 / 3)
    assert directional_variance(d, 1j).params["beta"] == pytest.approx([0.0, 1.0])


def test_variance_probe(honeycomb10):
    bundle, tg, wr = honeycomb10
    delta = bundle.te.mesh_size
    t_values = [0.5 * delta ** 2, 2 * delta ** 2]
    results = mc_variance_probe(tg, wr, t_values, n_walks=200, seed=4)
    assert len(results) == 2 * (2 + 1 + 1 + 3)
    early, late = results[:7], results[7:]
    assert all("below_scale" in r.flags for r in early)
    assert all("below_scale" not in r.flags for r in late)
    assert [r.name for r in late] == ["variance", "variance", "trace", "isotropy", "tail", "tail", "tail"]
    trace = late[2]
    assert trace.params["expected"] == pytest.approx(t_values[1])
    assert trace.stderr > 0
    assert all(r.seed == 4 for r in results if r.name != "isotropy")
    assert all(0 <= r.estimate <= 1 for r in results if r.name == "tail")
    again = mc_variance_probe(tg, wr, t_values, n_walks=200, seed=4)
    assert [r.estimate for r in again] == [r.estimate for r in results]


def test_variance_probe_rejects_bad_parameters(honeycomb10):
    _, tg, wr = honeycomb10
    with pytest.raises(ProbeError) as exc:
        mc_variance_probe(tg, wr, [1.0], n_walks=1)
    assert exc.value.error_type == "bad_parameters"
    with pytest.raises(ProbeError):
        mc_variance_probe(tg, wr, [], n_walks=10)


def test_rectangle_geometry():
    rect = Rectangle(1 + 1j, 2.0)
    assert rect.contains(np.array([1 + 1j, 7 + 3j, 7.5 + 1j])).tolist() == [True, True, False]
    assert rect.in_b1(np.array([-3 + 1j, 1 + 1j])).tolist() == [True, False]
    assert rect.in_b2(np.array([5 + 1.5j])).tolist() == [True]


def test_crossing_below_scale(honeycomb10):
    bundle, tg, wr = honeycomb10
    center = complex(tg.points[central_point(tg, wr)])
    res = mc_crossing_probe(tg, wr, center, 2 * bundle.te.mesh_size)
    assert res.flags == ["below_scale"]
    assert np.isnan(res.estimate)


def test_crossing_needs_coverage(honeycomb10):
    bundle, tg, wr = honeycomb10
    center = complex(tg.points[central_point(tg, wr)])
    with pytest.raises(ProbeError) as exc:
        mc_crossing_probe(tg, wr, center, 10 * bundle.te.mesh_size)
    assert exc.value.error_type == "not_covered"


def test_forward_crossing(honeycomb16):
    tg = build_tgraph(honeycomb16.te, honeycomb16.eta, honeycomb16.om, ALPHA)
    wr = walk_rates(tg)
    center = complex(tg.points[central_point(tg, wr)])
    res = mc_crossing_probe(tg, wr, center, 2.0, n_walks=200, seed=1, delta=0.2)
    assert 0.0 <= res.estimate <= 1.0
    assert res.params["walk"] == "forward"
    assert res.params["n_starts"] > 0
    assert res.params["lower_bound"] == pytest.approx(max(res.estimate - 3 * res.stderr, 0.0))
    again = mc_crossing_probe(tg, wr, center, 2.0, n_walks=200, seed=1, delta=0.2)
    assert again.estimate == res.estimate


def test_backward_crossing(honeycomb16):
    tg = build_tgraph(honeycomb16.te, honeycomb16.eta, honeycomb16.om, ALPHA, Flavor.WHITE_FLAT)
    wr = walk_rates(tg)
    center = complex(tg.points[central_point(tg, wr)])
    res = mc_crossing_probe(tg, wr, center, 2.0, n_walks=100, seed=2, backward=backward_structure(tg), delta=0.2)
    assert res.params["walk"] == "backward"
    assert 0.0 <= res.estimate <= 1.0


def test_oscillation():
    assert oscillation(np.array([0, 1, 1j])) == pytest.approx(np.sqrt(2))
    assert oscillation(np.array([5.0])) == 0.0


def test_linear_field_has_unit_exponent():
    xs = np.linspace(-4, 4, 81)
    positions = (xs[:, None] + 1j * xs[None, :]).ravel()
    res = oscillation_profile(positions, positions, 0j, [1.0, 2.0, 3.0], name="identity")
    assert res.estimate == pytest.approx(1.0, abs=0.08)
    assert res.params["r_squared"] > 0.99
    assert [row["r"] for row in res.table] == [1.0, 2.0, 3.0]
    assert not res.flags


def test_constant_field_oscillation():
    positions = np.linspace(0, 1, 50) + 0j
    res = oscillation_profile(positions, np.ones(50), 0.5, [0.1, 0.2, 0.4])
    assert res.flags == ["constant"]
    assert np.isnan(res.estimate)
    with pytest.raises(ProbeError) as exc:
        oscillation_profile(positions, np.ones(50), 0.5, [0.1, 0.2])
    assert exc.value.error_type == "too_few_radii"


def test_lipschitz_dichotomy(honeycomb10):
    bundle, tg, wr = honeycomb10
    center = complex(tg.points[central_point(tg, wr)])
    res = lipschitz_dichotomy(tg, bundle.eta, tg.images.real, center, 3.0)
    assert res.params["branch"] == "lipschitz"
    assert np.isfinite(res.estimate) and res.estimate > 0
    flat = lipschitz_dichotomy(tg, bundle.eta, np.ones(bundle.te.n_vertices), center, 3.0)
    assert flat.flags == ["constant"]
