"""Tests for the lattice builders and the translations between discrete holomorphicity frameworks."""
import numpy as np
import pytest

from tembed.core.errors import LatticeError
from tembed.core.models import Color
from tembed.dimers.inverse import invert_kasteleyn
from tembed.embedding.assumptions import check_assumptions
from tembed.embedding.kasteleyn import kasteleyn_matrix
from tembed.embedding.origami import origami_image_diameter
from tembed.embedding.tembedding import validate_tembedding
from tembed.holomorphy.coupling import coupling_functions
from tembed.holomorphy.extension import random_tholomorphic
from tembed.lattices.cgs import cgs_lattice, cgs_relations, edge_values, random_shol, shol_residual
from tembed.lattices.equivalence import (
    LatticeFunctionField,
    dn_residuals,
    ferrand_residual,
    holomorphy_equivalence,
)
from tembed.lattices.ising import check_dimer_weights, from_ising, rhombic_angles, spinor_law
from tembed.lattices.manager import lattice_kinds, regular_lattices
from tembed.lattices.orthodiagonal import (
    check_eta_values,
    check_gauge,
    check_harmonic_equivalence,
    check_tgraph_vertex_sets,
    ortho_operators,
    orthodiagonal_data,
    rectangle_projection_residual,
)
from tembed.lattices.square import diamond_splitting, square_class


@pytest.fixture(scope="module")
def ortho_uniform():
    return regular_lattices("orthodiagonal", 4)


@pytest.fixture(scope="module")
def ortho_uneven():
    return regular_lattices("orthodiagonal", 4, seed=3)


@pytest.fixture(scope="module")
def isoradial():
    return regular_lattices("isoradial-rhombic", 4, delta=0.5)


@pytest.fixture(scope="module")
def ising_jittered():
    return regular_lattices("s-embedding", 4, jitter=0.1, seed=2)


def test_lattice_kinds():
    assert lattice_kinds() == sorted(["square", "honeycomb", "isoradial-rhombic", "orthodiagonal",
                                      "s-embedding", "triangulation"])


def test_unknown_lattice():
    with pytest.raises(LatticeError) as exc:
        regular_lattices("kagome", 4)
    assert exc.value.error_type == "unknown_lattice"


@pytest.mark.parametrize("kind", ["square", "honeycomb", "orthodiagonal"])
def test_size_must_be_at_least_two(kind):
    with pytest.raises(LatticeError) as exc:
        regular_lattices(kind, 1)
    assert exc.value.error_type == "bad_size"


def test_square_bundle(square4):
    assert square4.meta["classes"] == {"B_R": 4, "B_I": 4, "W_lambda": 4, "W_ilambda": 4}
    assert origami_image_diameter(square4.om) <= np.sqrt(2) * square4.delta + 1e-12


def test_honeycomb_eta_takes_cube_roots(honeycomb4):
    te, eta = honeycomb4.te, honeycomb4.eta.eta
    ratios = eta[te.white] / eta[te.white[0]]
    assert np.allclose(ratios ** 3, 1.0)
    assert len({complex(np.round(r, 9)) for r in ratios}) == 3


@pytest.fixture(scope="module")
def triangulation6():
    return regular_lattices("triangulation", 6, seed=11)


def test_random_triangulation_is_isoradial_and_irregular(triangulation6):
    te = triangulation6.te
    report = validate_tembedding(te)
    assert report.ok
    assert report.metrics["max_angle_residual"] < 1e-10
    lo, hi = triangulation6.meta["circumradius"]
    assert lo == pytest.approx(1 / np.sqrt(3))
    assert hi == pytest.approx(1 / np.sqrt(3))
    lengths = np.array([abs(te.dT(e)) for e in te.g_edges])
    assert np.ptp(lengths) > 0.05
    other = regular_lattices("triangulation", 6, seed=12).te
    assert not np.allclose(other.positions, te.positions)


def test_random_triangulation_assumptions(triangulation6):
    te = triangulation6.te
    report = check_assumptions(te, triangulation6.om, r_grid=[1.0, 3.0], beta_grid=[0.1, 20.0])
    assert report.kappa[1.0] <= 1.0 + 1e-9
    assert report.kappa[3.0] <= report.kappa[1.0] + 1e-12
    coarse, fine = report.fatness
    assert coarse.n_nonfat == len(te.faces)
    assert len(coarse.components) == 1
    assert fine.n_nonfat == 0


def test_triangulation_without_jitter_is_equilateral():
    te = regular_lattices("triangulation", 4, seed=2, jitter=0.0).te
    lengths = [abs(te.dT(e)) for e in te.g_edges]
    assert lengths == pytest.approx([1.0] * len(lengths))
    with pytest.raises(LatticeError) as exc:
        regular_lattices("triangulation", 4, jitter=1.0)
    assert exc.value.error_type == "bad_jitter"


def test_uniform_orthodiagonal_grid(ortho_uniform):
    b = ortho_uniform
    assert np.allclose(b.data.conductance, 1.0)
    assert validate_tembedding(b.te).ok
    assert check_eta_values(b).ok
    assert check_gauge(b.te, b.data).ok
    assert all(b.te.faces[f].color is Color.WHITE for f in b.data.white_face)


def test_orthodiagonal_eta_takes_two_values(ortho_uneven):
    b = ortho_uneven
    assert not np.allclose(b.data.conductance, 1.0)
    assert check_eta_values(b).ok
    values = {complex(np.round(b.eta.eta[f] ** 2, 9)) for f in b.data.black_face.values()}
    assert values == {1 + 0j, -1 + 0j}
    assert b.meta["gauge_residual"] < 1e-10


def test_orthodiagonal_tgraphs(ortho_uneven):
    b = ortho_uneven
    scale = max(b.te.diameter, 1.0)
    assert check_tgraph_vertex_sets(b).ok
    assert rectangle_projection_residual(b) <= 1e-10 * scale
    report = check_harmonic_equivalence(b)
    assert report.ok
    assert report.metrics["n_points"] > 0


def test_ortho_operators(ortho_uneven):
    data = ortho_uneven.data
    z = data.positions
    idx = np.array(data.interior)
    coordinate = ortho_operators(data, z)
    assert np.max(np.abs(coordinate.dbar)) < 1e-10
    assert np.allclose(coordinate.d, 1.0)
    constant = ortho_operators(data, np.full(len(z), 2.5))
    assert np.max(np.abs(constant.laplacian[idx])) < 1e-12
    noise = np.random.default_rng(0).normal(size=len(z))
    assert ortho_operators(data, noise).factorization_residual <= 1e-10
    with pytest.raises(LatticeError) as exc:
        ortho_operators(data, np.zeros(3))
    assert exc.value.error_type == "domain_mismatch"


def test_non_orthogonal_quad_is_rejected():
    positions = [0, 1 - 0.5j, 2, 1.5 + 1j]
    with pytest.raises(LatticeError) as exc:
        orthodiagonal_data(positions, [True, False, True, False], [(0, 1, 2, 3)])
    assert exc.value.error_type == "not_orthodiagonal"
    with pytest.raises(LatticeError) as exc:
        orthodiagonal_data(positions, [True, True, False, False], [(0, 1, 2, 3)])
    assert exc.value.error_type == "bad_quad"


def test_isoradial_q_is_half_the_mesh(isoradial):
    data = isoradial.data
    assert np.allclose(data.Q[data.is_primal], 0.25)
    assert np.allclose(data.Q[~data.is_primal], -0.25)
    q = isoradial.q
    assert np.all(np.isnan(q[data.n_lambda:]))


def test_isoradial_residuals(isoradial):
    res = isoradial.data.residuals
    for key in ("propagation", "tangency", "closure_s", "closure_q", "origami_q", "origami_radius",
                "dimer_gauge", "laplacian", "geometry"):
        assert res[key] < 1e-8, key


def test_ising_construction(ising_jittered):
    b = ising_jittered
    data = b.data
    assert data.theta.min() > 0 and data.theta.max() < np.pi / 2
    assert data.residuals["propagation"] <= 1e-9
    assert data.residuals["tangency"] <= 1e-8
    for (a, d), x in zip(data.corners, data.X):
        assert data.Q[a] - data.Q[d] == pytest.approx(abs(x) ** 2)
    assert check_dimer_weights(b.te, data).ok
    assert b.meta["seed"] == 2


def test_ising_angles_must_be_in_range():
    with pytest.raises(LatticeError) as exc:
        from_ising(2, 2, theta=np.pi / 2)
    assert exc.value.error_type == "bad_angle"
    with pytest.raises(LatticeError) as exc:
        from_ising(2, 2, theta=np.full((3, 2), 0.5))
    assert exc.value.error_type == "bad_angle"


def test_train_tracks_must_form_rhombi():
    with pytest.raises(LatticeError) as exc:
        rhombic_angles([0.0, 0.0], [0.0, np.pi / 3])
    assert exc.value.error_type == "bad_train_tracks"
    with pytest.raises(LatticeError) as exc:
        regular_lattices("isoradial-rhombic", 3, alphas=[0.0, 0.0])
    assert exc.value.error_type == "bad_train_tracks"


def test_spinor_law_for_coupling_functions(ising_jittered):
    b = ising_jittered
    te = b.te
    cm = invert_kasteleyn(kasteleyn_matrix(te))
    F = coupling_functions(te, b.eta, cm, te.face_index["w5_1"])
    report = spinor_law(b, F)
    assert report.metrics["n_quads"] > 0
    assert report.ok


def constant_ferrand(bundle) -> np.ndarray:
    """1 on B_R squares, 0 on B_I, NaN on whites."""
    values = np.full(len(bundle.te.faces), np.nan + 0j, dtype=complex)
    for (p, q), f in bundle.data.face.items():
        cls = square_class(p, q)
        if cls == "B_R":
            values[f] = 1.0
        elif cls == "B_I":
            values[f] = 0.0
    return values


def test_constant_ferrand_is_s_holomorphic(square4):
    field_ = LatticeFunctionField("ferrand", constant_ferrand(square4))
    assert ferrand_residual(square4, field_.values) == 0.0
    report = holomorphy_equivalence(square4, field_, "s-hol")
    assert report.ok
    assert report.round_trip == pytest.approx(0.0, abs=1e-12)
    assert report.translated.support == "diamond corners"


def test_tholomorphic_square_round_trips(square4):
    te = square4.te
    F = random_tholomorphic(te, square4.eta, Color.WHITE, seed=6, splitting=diamond_splitting(square4))
    source = LatticeFunctionField("t-hol", F.coeffs, function=F)
    for target in ("s-hol", "ferrand"):
        report = holomorphy_equivalence(square4, source, target)
        assert report.target_residual <= 1e-9, target
        assert report.round_trip is not None and report.round_trip <= 1e-9, target


def test_dynnikov_novikov_sum_rule(honeycomb4):
    te = honeycomb4.te
    b = te.face_index["b1_1"]
    whites = [te.neighbor(u, v) for u, v in te.faces[b].sides()]
    assert None not in whites
    G = np.zeros(len(te.faces))
    G[whites] = [1.0, 1.0, -2.0]
    assert dn_residuals(honeycomb4, G)[b] == 0.0
    G[whites] = [1.0, 1.0, 1.0]
    assert dn_residuals(honeycomb4, G)[b] == pytest.approx(3.0)


def test_tholomorphic_honeycomb_is_dynnikov_novikov(honeycomb4):
    F = random_tholomorphic(honeycomb4.te, honeycomb4.eta, Color.BLACK, seed=5)
    report = holomorphy_equivalence(honeycomb4, LatticeFunctionField("t-hol", F.coeffs, function=F),
                                    "dynnikov-novikov")
    assert report.target_residual <= 1e-10
    assert report.round_trip <= 1e-8


def test_cgs_relations():
    data = cgs_lattice(3)
    F = random_shol(data, seed=1)
    assert shol_residual(data, F) < 1e-10
    report = cgs_relations(data, edge_values(data, F))
    assert report.ok
    assert report.metrics["n_hexagons"] == 4
    with pytest.raises(LatticeError):
        cgs_lattice(1)


def test_cgs_field_through_equivalence(honeycomb4):
    data = cgs_lattice(3)
    field_ = LatticeFunctionField("cgs", random_shol(data, seed=2), data=data)
    report = holomorphy_equivalence(honeycomb4, field_, "cgs")
    assert report.ok
    assert report.round_trip is None


def test_equivalence_errors(square4):
    with pytest.raises(LatticeError) as exc:
        LatticeFunctionField("conformal", np.zeros(1))
    assert exc.value.error_type == "unknown_framework"
    field_ = LatticeFunctionField("dynnikov-novikov", np.zeros(len(square4.te.faces)))
    with pytest.raises(LatticeError) as exc:
        holomorphy_equivalence(square4, field_, "t-hol")
    assert exc.value.error_type == "unsupported_pair"
