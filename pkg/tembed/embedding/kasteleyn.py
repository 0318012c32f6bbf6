"""Kasteleyn matrix K(b, w) = dT(bw*) of a t-embedding."""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from tembed.core.errors import EmbeddingError
from tembed.core.models import Color, DiagnosticsReport
from tembed.embedding.tembedding import TEmbedding

logger = logging.getLogger(__name__)

SIGN_TOL = 1e-10  # phase tolerance of the alternating product


@dataclass
class KasteleynMatrix:
    """Rows indexed by black faces, columns by white faces, in te.black/te.white order."""
    K: np.ndarray
    black: List[int]
    white: List[int]
    b_index: Dict[int, int] = field(default_factory=dict)
    w_index: Dict[int, int] = field(default_factory=dict)
    sign_report: Optional[DiagnosticsReport] = None

    def __post_init__(self):
        if not self.b_index:
            self.b_index = {f: i for i, f in enumerate(self.black)}
        if not self.w_index:
            self.w_index = {f: i for i, f in enumerate(self.white)}

    def entry(self, b: int, w: int) -> complex:
        """K(b, w) for face indices of the embedding."""
        return complex(self.K[self.b_index[b], self.w_index[w]])

    @property
    def shape(self):
        return self.K.shape


def alternating_product(te: TEmbedding, star: List[int], K: KasteleynMatrix) -> complex:
    """Alternating product of K around a closed vertex star.

    Black-to-white steps contribute K(b, w), white-to-black steps 1/K(b, w).
    """
    prod = 1.0 + 0.0j
    n = len(star)
    for j in range(n):
        f, g = star[j], star[(j + 1) % n]
        if te.faces[f].color is Color.BLACK:
            prod *= K.entry(f, g)
        else:
            prod /= K.entry(g, f)
    return prod


def check_kasteleyn_signs(te: TEmbedding, K: KasteleynMatrix) -> DiagnosticsReport:
    """Phase of the alternating product must be (−1)^(k+1) around each face of G of degree 2k."""
    report = DiagnosticsReport(subject=f"Kasteleyn signs of {te.name}")
    worst = 0.0
    for v in te.interior_vertices:
        star, closed = te.vertex_star(v)
        if not closed:
            continue
        k = len(star) // 2
        expected = (-1) ** (k + 1)
        prod = alternating_product(te, star, K)
        err = abs(np.angle(prod * expected))
        worst = max(worst, err)
        if err > SIGN_TOL:
            report.add("kasteleyn_sign", te.vertex_ids[v],
                       f"alternating product phase {np.angle(prod):.6f} at a face of degree {2 * k}",
                       value=float(err))
    report.metrics["max_phase_error"] = worst
    return report


def kasteleyn_matrix(te: TEmbedding, check: bool = True) -> KasteleynMatrix:
    """Build K from the edge increments and verify the sign condition.

    Raises:
        EmbeddingError: if some face of G fails the sign condition
    """
    black = list(te.black)
    white = list(te.white)
    K = KasteleynMatrix(np.zeros((len(black), len(white)), dtype=complex), black, white)
    for e in te.g_edges:
        K.K[K.b_index[e.b], K.w_index[e.w]] = te.dT(e)

    if check:
        report = check_kasteleyn_signs(te, K)
        K.sign_report = report
        if not report.ok:
            worst = report.errors[0]
            raise EmbeddingError(
                "kasteleyn_sign",
                f"{len(report.errors)} faces of G fail the Kasteleyn sign condition",
                worst.location, worst.value,
            )
    logger.info(f"Kasteleyn matrix of {te.name}: {K.K.shape[0]}x{K.K.shape[1]}, {len(te.g_edges)} nonzeros")
    return K
