"""Four-component decomposition F^{±±} of the inverse Kasteleyn matrix.

For a black face u• and a white face u° (both interior) the values
F^{±±}(u•, u°) are double sums of the real weights Re(η̄_b η̄_w K⁻¹(w, b))
over the neighbors w ~ u• and b ~ u° with coefficients c⁺ and c⁻ = conj(c⁺).
On a triangle c⁺ = t η with Σ t = 2 and Σ t η² = 0. A face of higher
degree is fan-split and c⁺ is the real-linear map taking the neighbor
weights to the value on one of its sub-triangles.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Tuple

import numpy as np

from tembed.core.errors import HolomorphyError
from tembed.core.models import Color
from tembed.dimers.inverse import CouplingMatrix
from tembed.embedding.origami import OrigamiField
from tembed.embedding.splitting import Splitting, build_splitting
from tembed.embedding.tembedding import TEmbedding
from tembed.holomorphy.extension import RANK_TOL, extend_projections, triangle_coefficients
from tembed.holomorphy.functions import THoloFunction

logger = logging.getLogger(__name__)


@dataclass
class PlusCoefficients:
    """c⁺ of one face (or one sub-triangle of a split face)."""
    face: int
    coefficients: Dict[int, complex]  # c⁺ per neighbor
    sides: Tuple[int, ...]  # neighbors whose projections the coefficients reproduce
    part: Optional[int] = None
    splitting_id: str = "none"


@dataclass
class FpmpmValues:
    """F^{++}, F^{+−}, F^{−+}, F^{−−} at one pair (u•, u°)."""
    black: int
    white: int
    pp: complex
    pm: complex
    mp: complex
    mm: complex
    c_black: Dict[int, complex]  # c⁺_{u•w} per white neighbor w
    c_white: Dict[int, complex]  # c⁺_{u°b} per black neighbor b
    white_sides: Tuple[int, ...] = ()  # w ~ u• where the reconstruction holds
    black_sides: Tuple[int, ...] = ()  # b ~ u° where the reconstruction holds
    splittings: Dict[str, str] = field(default_factory=lambda: {"black": "none", "white": "none"})
    max_reconstruction: float = 0.0

    def reconstruct(self, eta: OrigamiField, w: int, b: int) -> complex:
        """¼(F⁺⁺ + η_b²F⁺⁻ + η_w²F⁻⁺ + η_w²η_b²F⁻⁻), equal to K⁻¹(w, b) for w ~ u•, b ~ u°."""
        e_w2 = eta.eta2[w]
        e_b2 = eta.eta2[b]
        return complex(0.25 * (self.pp + e_b2 * self.pm + e_w2 * self.mp + e_w2 * e_b2 * self.mm))

    def to_dict(self, te: TEmbedding) -> dict:
        def pair(z):
            return [float(np.real(z)), float(np.imag(z))]

        return {
            "black": te.faces[self.black].id,
            "white": te.faces[self.white].id,
            "F++": pair(self.pp),
            "F+-": pair(self.pm),
            "F-+": pair(self.mp),
            "F--": pair(self.mm),
            "splitting": dict(self.splittings),
            "max_reconstruction": self.max_reconstruction,
        }


def _neighbors(te: TEmbedding, face: int) -> List[int]:
    out = []
    for u, v in te.faces[face].sides():
        g = te.neighbor(u, v)
        if g is not None:
            out.append(g)
    return out


def split_coefficients(te: TEmbedding, eta: OrigamiField, splitting: Splitting, face: int,
                       part: int = 0) -> Tuple[Dict[int, complex], Tuple[int, ...]]:
    """c⁺ of sub-triangle `part` of a split face.

    Sub-triangles are solved in fan order from their known sides; each
    diagonal carries the projection of the sub-triangle before it, so the
    value on sub-triangle j is a real-linear combination of the neighbor
    weights.

    Returns:
        (coefficient per neighbor, neighbors on the sides of the sub-triangle)

    Raises:
        HolomorphyError: if a sub-triangle has collinear projection directions
    """
    sf = splitting.faces[face]
    if not 0 <= part < len(sf.triangles):
        raise HolomorphyError("bad_part", f"face {te.faces[face].id} has {len(sf.triangles)} sub-triangles",
                              te.faces[face].id, float(part))
    known: Dict[FrozenSet[int], Tuple[complex, Dict[int, float]]] = {}
    coeffs: Dict[int, complex] = {}
    sides: List[int] = []
    for j, tri in enumerate(sf.triangles[:part + 1]):
        etas: List[complex] = []
        rows: List[Dict[int, float]] = []
        sides = []
        for k in range(3):
            u, v = tri[k], tri[(k + 1) % 3]
            key = frozenset((u, v))
            if key in known:
                e, row = known[key]
            else:
                g = te.neighbor(u, v)
                if g is None:
                    continue
                e, row = eta.eta[g], {g: 1.0}
                sides.append(g)
            etas.append(e)
            rows.append(row)
        A = np.column_stack([np.real(etas), np.imag(etas)])
        if np.linalg.matrix_rank(A, tol=RANK_TOL) < 2:
            raise HolomorphyError("collinear", f"sub-triangle {j} of face {te.faces[face].id} is underdetermined",
                                  te.faces[face].id)
        P = np.linalg.pinv(A)
        coeffs = {}
        for weight, row in zip(P[0] + 1j * P[1], rows):
            for g, x in row.items():
                coeffs[g] = coeffs.get(g, 0.0) + complex(weight * x)
        if j < len(sf.diagonals):
            e = splitting.diagonal_eta(te, eta, face, j)
            known[frozenset(sf.diagonals[j])] = (e, {g: float(np.real(np.conj(e) * c)) for g, c in coeffs.items()})
    return coeffs, tuple(sides)


def plus_coefficients(te: TEmbedding, eta: OrigamiField, face: int, splitting: Optional[Splitting] = None,
                      part: int = 0) -> PlusCoefficients:
    """c⁺ of an interior face.

    Triangles use c⁺ = t_g η_g over their three neighbors. Faces of higher
    degree go through the splitting (the default fan splitting of their
    color when none is given) and use sub-triangle `part`.

    Raises:
        HolomorphyError: if the face is on the boundary or its η directions are collinear
    """
    f = te.faces[face]
    if face in te.boundary_faces:
        raise HolomorphyError("boundary", f"face {f.id} is a boundary face", f.id)
    if f.degree > 3:
        if splitting is None:
            splitting = build_splitting(te, f.color)
        elif splitting.color is not f.color:
            raise HolomorphyError("bad_splitting", f"splitting of {splitting.color.value} faces given for {f.id}",
                                  f.id)
        coeffs, sides = split_coefficients(te, eta, splitting, face, part)
        return PlusCoefficients(face, coeffs, sides, part, splitting.id)
    nbrs = _neighbors(te, face)
    t = triangle_coefficients([eta.eta[g] for g in nbrs])
    return PlusCoefficients(face, {g: complex(tk * eta.eta[g]) for g, tk in zip(nbrs, t)}, tuple(nbrs))


def real_weights(te: TEmbedding, eta: OrigamiField, cm: CouplingMatrix) -> np.ndarray:
    """r[w, b] = Re(η̄_b η̄_w K⁻¹(w, b)) indexed like cm.Kinv."""
    K = cm.K
    e_w = np.array([eta.eta[w] for w in K.white])
    e_b = np.array([eta.eta[b] for b in K.black])
    return np.real(np.conj(e_w)[:, None] * np.conj(e_b)[None, :] * cm.Kinv)


def f_pmpm(te: TEmbedding, eta: OrigamiField, cm: CouplingMatrix, u_black: int, u_white: int,
           weights: Optional[np.ndarray] = None, splittings: Optional[Dict[Color, Splitting]] = None,
           parts: Tuple[int, int] = (0, 0)) -> FpmpmValues:
    """Compute F^{±±}(u•, u°) and check the reconstruction of K⁻¹ around the pair.

    Args:
        te: The t-embedding
        eta: Origami square root function
        cm: Inverse Kasteleyn matrix
        u_black: Interior black face
        u_white: Interior white face
        weights: Precomputed real_weights
        splittings: Splittings per color for faces of degree > 3 (default: fan splittings)
        parts: Sub-triangle used on (u•, u°) when they are split

    Raises:
        HolomorphyError: if a face is on the boundary or its η directions are collinear
    """
    splittings = splittings or {}
    r = weights if weights is not None else real_weights(te, eta, cm)
    plus_b = plus_coefficients(te, eta, u_black, splittings.get(Color.BLACK), parts[0])
    plus_w = plus_coefficients(te, eta, u_white, splittings.get(Color.WHITE), parts[1])
    c_b, c_w = plus_b.coefficients, plus_w.coefficients
    wi = cm.K.w_index
    bi = cm.K.b_index
    pp = pm = mp = mm = 0.0 + 0.0j
    for w, cw in c_b.items():
        for b, cb in c_w.items():
            x = r[wi[w], bi[b]]
            pp += cw * cb * x
            pm += cw * np.conj(cb) * x
            mp += np.conj(cw) * cb * x
            mm += np.conj(cw) * np.conj(cb) * x
    values = FpmpmValues(u_black, u_white, complex(pp), complex(pm), complex(mp), complex(mm), c_b, c_w,
                         plus_b.sides, plus_w.sides,
                         {"black": plus_b.splitting_id, "white": plus_w.splitting_id})

    worst = 0.0
    for w in plus_b.sides:
        for b in plus_w.sides:
            target = cm.inv(w, b)
            worst = max(worst, abs(values.reconstruct(eta, w, b) - target) / max(abs(target), 1e-300))
    values.max_reconstruction = worst
    logger.debug(f"F±± at ({te.faces[u_black].id}, {te.faces[u_white].id}): reconstruction {worst:.2e}, "
                 f"splittings {values.splittings}")
    return values


def fpmpm_field(te: TEmbedding, eta: OrigamiField, cm: CouplingMatrix, u_black: int,
                direction: complex = 1.0, weights: Optional[np.ndarray] = None,
                splitting: Optional[Splitting] = None) -> THoloFunction:
    """The field u° ↦ ½(η̄F⁺⁺(u•, u°) + ηF⁻⁺(u•, u°)) for a unit η.

    It is t-white-holomorphic away from the white neighbors of u•; its
    projected coefficients are t_b = Σ_w Re(η̄ c⁺_w) r_wb.
    """
    direction = complex(direction) / abs(direction)
    r = weights if weights is not None else real_weights(te, eta, cm)
    c_b = plus_coefficients(te, eta, u_black, splitting).coefficients
    coeffs = np.full(len(te.faces), np.nan)
    wi = cm.K.w_index
    for b, j in cm.K.b_index.items():
        total = 0.0
        for w, cw in c_b.items():
            total += np.real(np.conj(direction) * cw) * r[wi[w], j]
        coeffs[b] = total
    return extend_projections(te, eta, coeffs, kind=Color.WHITE, punctures=set(c_b), boundary="standard")
