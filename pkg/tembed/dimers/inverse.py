"""Dense inversion of the Kasteleyn matrix."""
import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from tembed.core.errors import DimerError
from tembed.embedding.kasteleyn import KasteleynMatrix

logger = logging.getLogger(__name__)

CONDITION_WARNING = 1e10
SINGULAR_RCOND = 1e-14


@dataclass
class CouplingMatrix:
    """K and its inverse K⁻¹ (rows indexed by white faces, columns by black faces)."""
    K: KasteleynMatrix
    Kinv: np.ndarray
    residual: float
    condition: float
    pivots: np.ndarray

    def inv(self, w: int, b: int) -> complex:
        """K⁻¹(w, b) for face indices of the embedding."""
        return complex(self.Kinv[self.K.w_index[w], self.K.b_index[b]])

    def row_identity(self) -> np.ndarray:
        """Σ_b K⁻¹(w, b) K(b, w) per white face; all ones for a valid inverse."""
        return np.einsum("wb,bw->w", self.Kinv, self.K.K)


def invert_kasteleyn(K: KasteleynMatrix) -> CouplingMatrix:
    """Invert K by LU with partial pivoting.

    Raises:
        DimerError: if K is rectangular or numerically singular
    """
    n_b, n_w = K.K.shape
    if n_b != n_w:
        raise DimerError("rectangular", f"K has shape {n_b}x{n_w}; |B| must equal |W|")
    if n_b == 0:
        raise DimerError("singular", "empty Kasteleyn matrix")

    lu, piv = scipy.linalg.lu_factor(K.K, check_finite=True)
    diag = np.abs(np.diag(lu))
    scale = float(np.max(np.abs(K.K)))
    if diag.min() <= SINGULAR_RCOND * max(scale, 1e-300):
        raise DimerError("singular", "Kasteleyn matrix is singular: no perfect matching or zero-weight degeneracy",
                         value=float(diag.min()))
    Kinv = scipy.linalg.lu_solve((lu, piv), np.eye(n_b, dtype=complex))
    residual = float(np.max(np.abs(K.K @ Kinv - np.eye(n_b))))
    condition = float(np.linalg.norm(K.K, 1) * np.linalg.norm(Kinv, 1))
    if condition > CONDITION_WARNING:
        logger.warning(f"Kasteleyn matrix is ill-conditioned (condition ~{condition:.2e})")
    logger.info(f"Inverted {n_b}x{n_b} Kasteleyn matrix: residual {residual:.2e}, condition {condition:.2e}")
    # K⁻¹ is indexed [white, black]
    return CouplingMatrix(K, Kinv, residual, condition, piv)
