"""t-holomorphic observables built from the inverse Kasteleyn matrix."""
import logging
from typing import Optional

import numpy as np

from tembed.core.errors import HolomorphyError
from tembed.core.models import Color
from tembed.dimers.inverse import CouplingMatrix
from tembed.embedding.origami import OrigamiField
from tembed.embedding.splitting import Splitting
from tembed.embedding.tembedding import TEmbedding
from tembed.holomorphy.extension import extend_projections
from tembed.holomorphy.functions import THoloFunction

logger = logging.getLogger(__name__)


def coupling_coefficients(te: TEmbedding, eta: OrigamiField, cm: CouplingMatrix, anchor: int) -> np.ndarray:
    """Real coefficients of η̄_anchor K⁻¹ on the faces of the other color."""
    coeffs = np.full(len(te.faces), np.nan)
    if te.faces[anchor].color is Color.WHITE:
        for b in te.black:
            coeffs[b] = np.real(np.conj(eta.eta[b]) * np.conj(eta.eta[anchor]) * cm.inv(anchor, b))
    else:
        for w in te.white:
            coeffs[w] = np.real(np.conj(eta.eta[w]) * np.conj(eta.eta[anchor]) * cm.inv(w, anchor))
    return coeffs


def coupling_functions(te: TEmbedding, eta: OrigamiField, cm: CouplingMatrix, anchor: int,
                       splitting: Optional[Splitting] = None) -> THoloFunction:
    """F_w^•(b) = η̄_w K⁻¹(w, b) for a white anchor, F_b°(w) = η̄_b K⁻¹(w, b) for a black one.

    The result is punctured at the anchor and satisfies standard boundary
    conditions: outer values are zero and every boundary face other than the
    anchor has a vanishing contour integral.

    Raises:
        HolomorphyError: if the anchor is a boundary face
    """
    face = te.faces[anchor]
    if anchor in te.boundary_faces:
        raise HolomorphyError("anchor_on_boundary", f"anchor {face.id} is a boundary face", face.id)
    coeffs = coupling_coefficients(te, eta, cm, anchor)
    F = extend_projections(te, eta, coeffs, kind=face.color, splitting=splitting,
                           punctures={anchor}, boundary="standard")
    logger.info(f"Coupling observable at {face.id} on {te.name} ({face.color.value} anchor)")
    return F
