"""Tests for t-holomorphic functions, their extension, primitives and the coupling observables."""
import numpy as np
import pytest

from tembed.core.errors import HolomorphyError
from tembed.core.models import Color
from tembed.dimers.inverse import invert_kasteleyn
from tembed.embedding.kasteleyn import kasteleyn_matrix
from tembed.embedding.splitting import build_splitting
from tembed.holomorphy.coupling import coupling_functions
from tembed.holomorphy.extension import (
    closed_form_from_projections,
    extend_projections,
    random_tholomorphic,
    solve_from_projections,
    tholomorphic_space,
)
from tembed.holomorphy.fpmpm import f_pmpm, fpmpm_field
from tembed.holomorphy.functions import check_tholomorphic, constant_function, involution, projection_coefficient
from tembed.holomorphy.primitives import path_integral, primitive, product_form_integral


@pytest.fixture(scope="module")
def square_coupling(square4):
    return invert_kasteleyn(kasteleyn_matrix(square4.te))


@pytest.fixture(scope="module")
def honeycomb_coupling(honeycomb4):
    return invert_kasteleyn(kasteleyn_matrix(honeycomb4.te))


def test_value_from_three_projections():
    z = 0.7 - 0.4j
    etas = [np.exp(1j * a) for a in (0.0, np.pi / 3, 2 * np.pi / 3)]
    ts = [projection_coefficient(e, z) for e in etas]
    solved, rank = solve_from_projections(etas, ts)
    assert rank == 2
    assert solved == pytest.approx(z)
    assert closed_form_from_projections(etas, ts) == pytest.approx(z)


def test_closed_form_needs_independent_directions():
    with pytest.raises(HolomorphyError) as exc:
        closed_form_from_projections([1, 1, 1j], [0.0, 0.0, 0.0])
    assert exc.value.error_type == "collinear"
    with pytest.raises(HolomorphyError) as exc:
        closed_form_from_projections([1, 1j], [0.0, 0.0])
    assert exc.value.error_type == "not_triangle"


@pytest.mark.parametrize("kind", [Color.WHITE, Color.BLACK])
def test_constant_function_is_tholomorphic(honeycomb4, kind):
    F = constant_function(honeycomb4.te, honeycomb4.eta, 0.4 + 1.1j, kind)
    report = check_tholomorphic(honeycomb4.te, F)
    assert report.ok
    assert report.metrics["max_contour"] < 1e-9


def test_extension_recovers_constant(honeycomb4):
    te, eta = honeycomb4.te, honeycomb4.eta
    c = -0.3 + 0.8j
    F = extend_projections(te, eta, constant_function(te, eta, c).coeffs)
    interior = [w for w in te.white if w not in te.boundary_faces]
    assert interior
    assert np.allclose(F.values[interior], c)


def test_extension_rejects_non_holomorphic_data(honeycomb4):
    te, eta = honeycomb4.te, honeycomb4.eta
    coeffs = np.full(len(te.faces), np.nan)
    coeffs[te.black] = np.random.default_rng(0).normal(size=len(te.black))
    with pytest.raises(HolomorphyError) as exc:
        extend_projections(te, eta, coeffs)
    assert exc.value.error_type == "not_solvable"


def test_random_tholomorphic_is_seeded(honeycomb4):
    te, eta = honeycomb4.te, honeycomb4.eta
    unknowns, basis = tholomorphic_space(te, eta)
    assert unknowns == te.black
    assert basis.shape[1] > 0
    F = random_tholomorphic(te, eta, seed=3)
    G = random_tholomorphic(te, eta, seed=3)
    assert np.array_equal(F.coeffs, G.coeffs, equal_nan=True)
    assert check_tholomorphic(te, F).ok


def test_random_tholomorphic_with_split_faces(square4):
    F = random_tholomorphic(square4.te, square4.eta, seed=1)
    assert F.splitting is not None
    report = check_tholomorphic(square4.te, F)
    assert report.ok
    assert report.metrics["max_projection"] < 1e-9


def test_involution_fixes_tholomorphic_fields(honeycomb4):
    F = random_tholomorphic(honeycomb4.te, honeycomb4.eta, seed=2)
    assert np.allclose(involution(F).coeffs, F.coeffs, equal_nan=True)


def test_linear_combinations_stay_tholomorphic(honeycomb4):
    te, eta = honeycomb4.te, honeycomb4.eta
    F = random_tholomorphic(te, eta, seed=4).scaled(2.5).added(constant_function(te, eta, 1j))
    assert check_tholomorphic(te, F).ok


def test_primitive_of_constant(square4):
    te, eta, om = square4.te, square4.eta, square4.om
    c = 0.5 + 0.25j
    prim = primitive(te, constant_function(te, eta, c), basepoint=om.base)
    # I[c] = c·T + conj(c)·conj(O) up to the basepoint
    expected = c * (te.positions - te.positions[om.base]) + np.conj(c) * np.conj(om.values)
    assert np.allclose(prim.values, expected)
    assert prim.max_face_closure < 1e-12


def test_primitive_projection(square4):
    te, eta, om = square4.te, square4.eta, square4.om
    alpha = np.exp(0.4j)
    full = primitive(te, constant_function(te, eta, 1.0), basepoint=om.base)
    projected = primitive(te, constant_function(te, eta, 1.0), basepoint=om.base, alpha=alpha)
    assert np.allclose(projected.values, alpha * np.real(np.conj(alpha) * full.values))


def test_path_integral_rejects_non_edges(square4):
    te = square4.te
    F = constant_function(te, square4.eta, 1.0)
    with pytest.raises(HolomorphyError) as exc:
        path_integral(te, F, [0, te.n_vertices - 1])
    assert exc.value.error_type == "bad_path"


def test_product_form_needs_both_kinds(square4):
    te, eta = square4.te, square4.eta
    F = constant_function(te, eta, 1.0)
    with pytest.raises(HolomorphyError) as exc:
        product_form_integral(te, F, F, te.interior_vertices[:2])
    assert exc.value.error_type == "bad_kind"


def test_coupling_function_is_tholomorphic(square4, square_coupling):
    te, eta = square4.te, square4.eta
    anchor = te.face_index["s1_2"]
    F = coupling_functions(te, eta, square_coupling, anchor)
    assert F.punctures == {anchor}
    assert F.boundary == "standard"
    report = check_tholomorphic(te, F)
    assert report.ok
    prim = primitive(te, F, basepoint=min(te.boundary_vertices))
    assert prim.monodromy[anchor] == pytest.approx(2 * np.conj(eta.eta[anchor]), abs=1e-9)


def test_coupling_with_black_anchor(honeycomb4, honeycomb_coupling):
    te = honeycomb4.te
    anchor = te.face_index["b1_1"]
    F = coupling_functions(te, honeycomb4.eta, honeycomb_coupling, anchor)
    assert F.kind is Color.BLACK
    assert check_tholomorphic(te, F).ok


def test_coupling_anchor_on_boundary(square4, square_coupling):
    te = square4.te
    with pytest.raises(HolomorphyError) as exc:
        coupling_functions(te, square4.eta, square_coupling, te.face_index["s0_1"])
    assert exc.value.error_type == "anchor_on_boundary"


@pytest.fixture(scope="module")
def square6_coupling(square6):
    return invert_kasteleyn(kasteleyn_matrix(square6.te))


def test_fpmpm_reconstructs_inverse(honeycomb4, honeycomb_coupling):
    te = honeycomb4.te
    values = f_pmpm(te, honeycomb4.eta, honeycomb_coupling, te.face_index["b1_1"], te.face_index["w2_2"])
    assert len(values.c_black) == len(values.c_white) == 3
    assert values.splittings == {"black": "none", "white": "none"}
    assert values.mm == pytest.approx(np.conj(values.pp), abs=1e-12)
    assert values.max_reconstruction < 1e-8


def test_fpmpm_on_split_squares(square4, square_coupling):
    te, eta = square4.te, square4.eta
    values = f_pmpm(te, eta, square_coupling, te.face_index["s1_1"], te.face_index["s2_1"])
    assert values.splittings["black"].startswith("fan-black-")
    assert values.splittings["white"].startswith("fan-white-")
    assert len(values.white_sides) == len(values.black_sides) == 2
    assert values.mm == pytest.approx(np.conj(values.pp), abs=1e-12)
    for w in values.white_sides:
        for b in values.black_sides:
            assert values.reconstruct(eta, w, b) == pytest.approx(square_coupling.inv(w, b), abs=1e-10)
    assert values.max_reconstruction < 1e-8
    assert values.to_dict(te)["splitting"] == values.splittings


@pytest.mark.parametrize("parts", [(0, 0), (0, 1), (1, 0), (1, 1)])
def test_fpmpm_on_every_sub_triangle(square6, square6_coupling, parts):
    te = square6.te
    splittings = {color: build_splitting(te, color) for color in (Color.BLACK, Color.WHITE)}
    values = f_pmpm(te, square6.eta, square6_coupling, te.face_index["s1_1"], te.face_index["s4_1"],
                    splittings=splittings, parts=parts)
    assert values.max_reconstruction < 1e-8
    assert values.splittings == {"black": splittings[Color.BLACK].id, "white": splittings[Color.WHITE].id}


def test_fpmpm_rejects_bad_faces(square4, square_coupling):
    te = square4.te
    with pytest.raises(HolomorphyError) as exc:
        f_pmpm(te, square4.eta, square_coupling, te.face_index["s1_1"], te.face_index["s2_1"], parts=(2, 0))
    assert exc.value.error_type == "bad_part"
    with pytest.raises(HolomorphyError) as exc:
        f_pmpm(te, square4.eta, square_coupling, te.face_index["s0_0"], te.face_index["s2_1"])
    assert exc.value.error_type == "boundary"


def test_fpmpm_field_is_tholomorphic(honeycomb4, honeycomb_coupling):
    te = honeycomb4.te
    b = te.face_index["b1_1"]
    F = fpmpm_field(te, honeycomb4.eta, honeycomb_coupling, b)
    assert F.kind is Color.WHITE
    assert F.punctures
    assert check_tholomorphic(te, F).ok
