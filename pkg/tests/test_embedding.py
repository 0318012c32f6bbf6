"""Tests for t-embedding validation, Kasteleyn signs, circle patterns and the origami map."""
import numpy as np
import pytest

from tembed.core.errors import EmbeddingError
from tembed.core.models import Color, Mode, Severity
from tembed.embedding.assumptions import check_assumptions, face_inradius
from tembed.embedding.circle_pattern import circle_pattern, closure_residuals, reflect
from tembed.embedding.kasteleyn import check_kasteleyn_signs, kasteleyn_matrix
from tembed.embedding.origami import (
    check_phi_increments,
    compute_eta,
    compute_origami,
    origami_field,
    origami_image_diameter,
)
from tembed.embedding.splitting import build_splitting
from tembed.embedding.tembedding import TEmbedding, TFace, find_overlaps, validate_tembedding
from tembed.lattices.square import square_tembedding


def displaced_square(dz: complex = 0.1 + 0.05j):
    """4 × 4 square grid with vertex p2_2 moved off the lattice."""
    te, grid = square_tembedding(4)
    positions = te.positions.copy()
    positions[grid.vertex[(2, 2)]] += dz
    return TEmbedding(positions, te.faces, te.vertex_ids, te.mode, "displaced")


def test_square_geometry(square4):
    te = square4.te
    assert te.n_vertices == 25
    assert len(te.faces) == 16
    assert len(te.black) == len(te.white) == 8
    assert np.allclose(te.areas, 1.0)
    assert te.mesh_size == pytest.approx(np.sqrt(2))
    assert te.diameter == pytest.approx(4 * np.sqrt(2))
    assert len(te.interior_vertices) == 9
    assert len(te.g_edges) == 24


def test_square_validates_with_zero_residuals(square4):
    report = validate_tembedding(square4.te)
    assert report.ok
    assert len(report.details["angle_residuals"]) == 9
    assert report.metrics["max_angle_residual"] < 1e-12
    exempt = report.of_kind("exempt")
    assert len(exempt) == 16
    assert all(v.severity is Severity.INFO for v in exempt)


def test_whole_plane_mode_flags_patch_boundary(square4):
    report = validate_tembedding(square4.te, Mode.WHOLE_PLANE)
    assert report.ok
    assert len(report.of_kind("patch_boundary")) == 16
    assert not report.of_kind("exempt")


def test_displaced_vertex_breaks_angle_condition():
    te = displaced_square()
    report = validate_tembedding(te)
    assert not report.ok
    assert "p2_2" in [v.location for v in report.of_kind("angle")]
    assert not report.of_kind("convexity")
    assert not report.of_kind("orientation")


def test_clockwise_face_is_rejected():
    te = TEmbedding([0, 1j, 1 + 1j, 1], [TFace("cw", Color.BLACK, (0, 1, 2, 3))])
    report = validate_tembedding(te)
    assert [v.location for v in report.of_kind("orientation")] == ["cw"]


def test_duplicate_half_edge_raises():
    te, _ = square_tembedding(2)
    with pytest.raises(EmbeddingError) as exc:
        TEmbedding(te.positions, list(te.faces) + [te.faces[0]], te.vertex_ids)
    assert exc.value.error_type == "overlap"


def test_no_overlaps_on_lattices(square4, honeycomb4):
    assert find_overlaps(square4.te) == []
    assert find_overlaps(honeycomb4.te) == []
    assert validate_tembedding(square4.te, paranoid=True).ok


def test_dimer_graph_weights_are_edge_lengths(square4, honeycomb4):
    assert all(e.x == pytest.approx(1.0) for e in square4.te.to_dimer_graph().edges)
    assert all(e.x == pytest.approx(1.0) for e in honeycomb4.te.to_dimer_graph().edges)


@pytest.mark.parametrize("name", ["square4", "honeycomb4", "triangulation4"])
def test_kasteleyn_signs_hold(name, request):
    te = request.getfixturevalue(name).te
    K = kasteleyn_matrix(te)
    assert K.shape == (len(te.black), len(te.white))
    assert K.sign_report.metrics["max_phase_error"] < 1e-10
    e = te.g_edges[0]
    assert K.entry(e.b, e.w) == te.dT(e)


def test_kasteleyn_signs_fail_off_the_angle_condition():
    te = displaced_square()
    report = check_kasteleyn_signs(te, kasteleyn_matrix(te, check=False))
    assert not report.ok
    assert report.of_kind("kasteleyn_sign")
    with pytest.raises(EmbeddingError) as exc:
        kasteleyn_matrix(te)
    assert exc.value.error_type == "kasteleyn_sign"


def test_reflect():
    p, q = 1 + 1j, 3 + 2j
    z = 0.3 - 2.1j
    assert reflect(reflect(z, p, q), p, q) == pytest.approx(z)
    assert reflect(p + 0.25 * (q - p), p, q) == pytest.approx(p + 0.25 * (q - p))
    assert reflect(1j, 0, 1) == pytest.approx(-1j)


@pytest.mark.parametrize("name", ["square4", "honeycomb4", "triangulation4"])
def test_circle_pattern_closes(name, request):
    te = request.getfixturevalue(name).te
    cp = circle_pattern(te, te.white[0], 0.3 + 0.2j)
    assert cp.max_residual <= 1e-10 * te.diameter
    assert max(closure_residuals(te, cp).values()) < 1e-9
    assert cp.at(te, te.faces[te.white[0]].id) == 0.3 + 0.2j


def test_circle_pattern_fails_off_the_angle_condition():
    te = displaced_square()
    with pytest.raises(EmbeddingError) as exc:
        circle_pattern(te, te.white[0], 0.3 + 0.2j)
    assert exc.value.error_type == "circle_closure"


def test_compute_eta_normalization(honeycomb4):
    te = honeycomb4.te
    eta = compute_eta(te)
    assert eta.base_face == te.white[0]
    assert eta.eta[te.white[0]] == 1
    assert np.allclose(np.abs(eta.eta), 1.0)
    assert set(eta.edge_signs.values()) <= {-1, 1}


@pytest.mark.parametrize("name", ["square4", "honeycomb4", "triangulation4"])
def test_eta_squared_matches_edges(name, request):
    bundle = request.getfixturevalue(name)
    te, eta = bundle.te, bundle.eta
    for e in te.g_edges:
        d = te.dT(e) / abs(te.dT(e))
        assert (np.conj(eta.eta[e.b]) * np.conj(eta.eta[e.w])) ** 2 == pytest.approx(d ** 2)
    assert check_phi_increments(te, eta).metrics["max_residual"] < 1e-10


def test_inconsistent_eta_raises(square4):
    te = square4.te
    with pytest.raises(EmbeddingError) as exc:
        origami_field(te, np.ones(len(te.faces), dtype=complex))
    assert exc.value.error_type == "eta_inconsistent"


def test_square_canonical_eta(square4):
    grid = square4.data
    eta = square4.eta.eta
    assert eta[grid.face[(0, 0)]] == 1
    assert eta[grid.face[(1, 1)]] == 1j


@pytest.mark.parametrize("name", ["square4", "honeycomb4", "triangulation4"])
def test_origami_is_isometric_on_edges(name, request):
    bundle = request.getfixturevalue(name)
    te, om = bundle.te, bundle.om
    assert om.max_closure <= 1e-10
    assert om.values[om.base] == 0
    for (u, v) in te.half_edges:
        assert abs(om.values[v] - om.values[u]) == pytest.approx(abs(te.positions[v] - te.positions[u]))


def test_origami_rotation(square4):
    alpha = np.exp(0.3j)
    rotated = square4.om.rotated(alpha)
    assert np.allclose(rotated.values, square4.om.values * alpha ** 2)
    eta = square4.eta.rotated(alpha)
    w, b = square4.te.white[0], square4.te.black[0]
    assert eta.eta[w] == pytest.approx(alpha * square4.eta.eta[w])
    assert eta.eta[b] == pytest.approx(np.conj(alpha) * square4.eta.eta[b])
    # recomputing from the rotated field gives the rotated map
    om = compute_origami(square4.te, eta, base=square4.om.base)
    assert np.allclose(om.values, rotated.values)


def test_square_origami_folds_onto_one_square(square4):
    assert origami_image_diameter(square4.om) == pytest.approx(np.sqrt(2))


def test_origami_is_lipschitz(square6):
    report = check_assumptions(square6.te, square6.om, r_grid=[1.0, 4.0], beta_grid=[1.0])
    assert report.exhaustive
    assert report.delta == pytest.approx(np.sqrt(2))
    assert report.kappa[1.0] <= 1.0 + 1e-9
    assert report.kappa[4.0] <= np.sqrt(2) / 4 + 1e-9
    level = report.fatness[0]
    assert level.rho == pytest.approx(np.exp(-1.0 / np.sqrt(2)))
    assert level.n_nonfat == sum(len(c) for c in level.components)


def test_fan_splitting(square4):
    te = square4.te
    splitting = build_splitting(te, Color.WHITE)
    assert splitting.id.startswith("fan-white-")
    assert set(splitting.faces) == set(te.white)
    for f, sf in splitting.faces.items():
        assert len(sf.triangles) == 2
        assert len(sf.diagonals) == 1
        assert abs(splitting.diagonal_eta(te, square4.eta, f, 0)) == pytest.approx(1.0)
        # right isosceles halves of a unit square
        assert face_inradius(te, f, splitting) == pytest.approx(1 / (2 + np.sqrt(2)))
    assert build_splitting(te, Color.WHITE).id == splitting.id
