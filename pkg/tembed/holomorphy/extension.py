"""Extension of projected values to true values on the other color."""
import logging
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import null_space

from tembed.core.errors import HolomorphyError
from tembed.core.models import Color
from tembed.embedding.origami import OrigamiField
from tembed.embedding.splitting import Splitting, build_splitting
from tembed.embedding.tembedding import TEmbedding
from tembed.holomorphy.functions import THoloFunction, projection_coefficient

logger = logging.getLogger(__name__)

SOLVABILITY_TOL = 1e-8
RANK_TOL = 1e-12


def solve_from_projections(etas: Sequence[complex], ts: Sequence[float]) -> Tuple[complex, int]:
    """Least-squares F with Re(conj(η_k) F) = t_k; returns F and the rank of the system."""
    if len(etas) == 0:
        return complex(np.nan, np.nan), 0
    etas = np.asarray(etas, dtype=complex)
    A = np.column_stack([etas.real, etas.imag])
    sol, _, rank, _ = np.linalg.lstsq(A, np.asarray(ts, dtype=float), rcond=RANK_TOL)
    return complex(sol[0], sol[1]), int(rank)


def closed_form_from_projections(etas: Sequence[complex], ts: Sequence[float]) -> complex:
    """F = Σ s_k t_k η_k with Σ s_k = 2 and Σ s_k η_k² = 0, for three directions.

    Raises:
        HolomorphyError: if the three η² are collinear
    """
    etas = np.asarray(etas, dtype=complex)
    if len(etas) != 3:
        raise HolomorphyError("not_triangle", f"closed form needs 3 directions, got {len(etas)}")
    s = triangle_coefficients(etas)
    return complex(np.sum(s * np.asarray(ts) * etas))


def triangle_coefficients(etas: Sequence[complex]) -> np.ndarray:
    """Real s with Σ s_k = 2 and Σ s_k η_k² = 0."""
    e2 = np.asarray(etas, dtype=complex) ** 2
    A = np.vstack([np.ones(3), e2.real, e2.imag])
    if abs(np.linalg.det(A)) < RANK_TOL:
        raise HolomorphyError("collinear", "eta directions are collinear; coefficient system is singular")
    return np.linalg.solve(A, np.array([2.0, 0.0, 0.0]))


def _rows(te: TEmbedding, eta: OrigamiField, coeffs: np.ndarray, tri: Tuple[int, int, int],
          diag_known: dict) -> Tuple[List[complex], List[float], List[complex]]:
    """Projection rows of one (sub-)triangle: η, t and the side increment dT."""
    etas, ts, sides = [], [], []
    for k in range(3):
        u, v = tri[k], tri[(k + 1) % 3]
        key = frozenset((u, v))
        if key in diag_known:
            e, t = diag_known[key]
        else:
            g = te.neighbor(u, v)
            if g is None or np.isnan(coeffs[g]):
                continue
            e, t = eta.eta[g], coeffs[g]
        etas.append(e)
        ts.append(t)
        sides.append(te.positions[v] - te.positions[u])
    return etas, ts, sides


def extend_projections(te: TEmbedding, eta: OrigamiField, coeffs: np.ndarray,
                       kind: Color = Color.WHITE, splitting: Optional[Splitting] = None,
                       punctures: Iterable[int] = (), boundary: str = "none") -> THoloFunction:
    """Recover true values from projected coefficients.

    Args:
        te: The t-embedding
        eta: Origami square root function
        coeffs: Real t per face on the projection color (NaN elsewhere)
        kind: Color receiving true values (WHITE for t-white-holomorphic functions)
        splitting: Splitting of the faces of `kind`; built with the default anchors when
            a face of degree > 3 needs one
        punctures: Faces where the contour condition is not required
        boundary: "standard" also checks the contour on boundary faces

    Returns:
        THoloFunction with values per face and per sub-triangle of split faces

    Raises:
        HolomorphyError: if a contour integral does not vanish or an interior
            face has collinear projection directions
    """
    punctures = set(punctures)
    coeffs = np.asarray(coeffs, dtype=float)
    n = len(te.faces)
    if splitting is None and any(te.faces[f].degree > 3 for f in te.faces_of(kind)):
        splitting = build_splitting(te, kind)
    values = np.full(n, np.nan + 0j, dtype=complex)
    sub_values = {}
    diag_coeffs = {}

    for f in te.faces_of(kind):
        face = te.faces[f]
        on_boundary = f in te.boundary_faces
        if f not in punctures and (not on_boundary or boundary == "standard"):
            total, scale = _contour(te, eta, coeffs, f)
            if abs(total) > SOLVABILITY_TOL * max(scale, 1e-300):
                raise HolomorphyError("not_solvable",
                                      f"contour integral {abs(total):.3e} does not vanish on face {face.id}",
                                      face.id, float(abs(total)))
        if f in punctures:
            continue

        if splitting is not None and splitting.is_split(f):
            sf = splitting.faces[f]
            known = {}
            subs: List[complex] = []
            diags: List[float] = []
            for j, tri in enumerate(sf.triangles):
                etas, ts, _ = _rows(te, eta, coeffs, tri, known)
                z, rank = solve_from_projections(etas, ts)
                if rank < 2:
                    if not on_boundary:
                        raise HolomorphyError("collinear", f"sub-triangle {j} of face {face.id} is underdetermined",
                                              face.id)
                    z = complex(np.nan, np.nan)
                subs.append(z)
                if j < len(sf.diagonals):
                    a, c = sf.diagonals[j]
                    e = splitting.diagonal_eta(te, eta, f, j)
                    t = projection_coefficient(e, z) if not np.isnan(z) else np.nan
                    diags.append(t)
                    if not np.isnan(t):
                        known[frozenset((a, c))] = (e, t)
            sub_values[f] = subs
            diag_coeffs[f] = diags
            finite = [z for z in subs if not np.isnan(z)]
            values[f] = finite[0] if finite else complex(np.nan, np.nan)
            continue

        etas, ts, _ = _face_rows(te, eta, coeffs, f)
        z, rank = solve_from_projections(etas, ts)
        if rank < 2:
            if not on_boundary:
                raise HolomorphyError("collinear", f"projection directions around {face.id} are collinear", face.id)
            z = complex(np.nan, np.nan)
        values[f] = z

    proj = np.where(np.array([c is kind for c in eta.colors]), np.nan, coeffs)
    logger.debug(f"Extended {kind.value} values on {te.name} ({len(sub_values)} split faces)")
    return THoloFunction(kind, eta, proj, values, sub_values, diag_coeffs, punctures, boundary, splitting)


def _face_rows(te: TEmbedding, eta: OrigamiField, coeffs: np.ndarray, f: int):
    etas, ts, sides = [], [], []
    for u, v in te.faces[f].sides():
        g = te.neighbor(u, v)
        if g is None or np.isnan(coeffs[g]):
            continue
        etas.append(eta.eta[g])
        ts.append(coeffs[g])
        sides.append(te.positions[v] - te.positions[u])
    return etas, ts, sides


def _contour(te: TEmbedding, eta: OrigamiField, coeffs: np.ndarray, f: int) -> Tuple[complex, float]:
    total = 0.0 + 0.0j
    scale = 0.0
    for u, v in te.faces[f].sides():
        g = te.neighbor(u, v)
        if g is None or np.isnan(coeffs[g]):
            continue
        dT = te.positions[v] - te.positions[u]
        total += coeffs[g] * eta.eta[g] * dT
        scale += abs(coeffs[g]) * abs(dT)
    return complex(total), scale


def tholomorphic_space(te: TEmbedding, eta: OrigamiField, kind: Color = Color.WHITE) -> Tuple[List[int], np.ndarray]:
    """Basis of projected coefficients whose contours vanish around every interior face of `kind`.

    Returns:
        (faces carrying the coefficients, matrix with one basis vector per column)
    """
    unknowns = te.faces_of(kind.other)
    column = {g: k for k, g in enumerate(unknowns)}
    rows = []
    for f in te.faces_of(kind):
        if f in te.boundary_faces:
            continue
        row = np.zeros(len(unknowns), dtype=complex)
        for u, v in te.faces[f].sides():
            g = te.neighbor(u, v)
            if g is not None:
                row[column[g]] += eta.eta[g] * (te.positions[v] - te.positions[u])
        rows.append(row)
    if not rows:
        return unknowns, np.eye(len(unknowns))
    A = np.vstack(rows)
    return unknowns, null_space(np.vstack([A.real, A.imag]))


def random_tholomorphic(te: TEmbedding, eta: OrigamiField, kind: Color = Color.WHITE, seed: int = 0,
                        splitting: Optional[Splitting] = None) -> THoloFunction:
    """A seeded random real combination of the t-holomorphic basis, extended to true values.

    Raises:
        HolomorphyError: if only the zero function satisfies the contour conditions
    """
    unknowns, basis = tholomorphic_space(te, eta, kind)
    if basis.shape[1] == 0:
        raise HolomorphyError("trivial", f"no non-zero t-{kind.value}-holomorphic function on {te.name}")
    rng = np.random.default_rng(seed)
    coeffs = np.full(len(te.faces), np.nan)
    coeffs[unknowns] = basis @ rng.normal(size=basis.shape[1])
    logger.debug(f"Random t-{kind.value}-holomorphic function on {te.name} from a "
                 f"{basis.shape[1]}-dimensional space")
    return extend_projections(te, eta, coeffs, kind, splitting)
