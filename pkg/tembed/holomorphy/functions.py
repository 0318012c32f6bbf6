"""t-holomorphic functions on a t-embedding.

A t-white-holomorphic function F has projected values F^•(b) = t_b η_b on
black faces and true values F°(w) on white faces, tied by
Pr(F°(w), η_b ℝ) = F^•(b) for b ~ w, and its projections integrate to
zero around every interior white face. Colors swap for t-black-holomorphic
functions. The projected values are stored by their real coefficient t.
"""
import logging
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, List, Optional, Set, Tuple

import numpy as np

from tembed.core.models import Color, DiagnosticsReport
from tembed.embedding.origami import OrigamiField
from tembed.embedding.splitting import Splitting
from tembed.embedding.tembedding import TEmbedding

logger = logging.getLogger(__name__)

PROJECTION_TOL = 1e-9
CONTOUR_TOL = 1e-9


@dataclass
class THoloFunction:
    """Projected coefficients on one color and true values on the other.

    kind is the color carrying the true values: Color.WHITE for
    t-white-holomorphic functions.
    """
    kind: Color
    eta: OrigamiField
    coeffs: np.ndarray  # real t per face, NaN where undefined
    values: np.ndarray  # complex per face, NaN where undefined
    sub_values: Dict[int, List[complex]] = field(default_factory=dict)
    diag_coeffs: Dict[int, List[float]] = field(default_factory=dict)
    punctures: Set[int] = field(default_factory=set)
    boundary: str = "none"  # "none" or "standard"
    splitting: Optional[Splitting] = None

    @property
    def projection_color(self) -> Color:
        return self.kind.other

    @property
    def splitting_id(self) -> str:
        return self.splitting.id if self.splitting is not None else "none"

    def projected(self, face: int) -> complex:
        """F^•(b) = t_b η_b (or F°(w) for t-black-holomorphic functions)."""
        return complex(self.coeffs[face] * self.eta.eta[face])

    def projected_values(self) -> np.ndarray:
        return self.coeffs * self.eta.eta

    def value_on_side(self, te: TEmbedding, face: int, u: int, v: int) -> complex:
        """True value of the (sub-)face containing the side u–v of a face."""
        if face in self.sub_values and self.splitting is not None and self.splitting.is_split(face):
            for j, tri in enumerate(self.splitting.faces[face].triangles):
                if u in tri and v in tri:
                    return self.sub_values[face][j]
        return complex(self.values[face])

    def scaled(self, a: float) -> "THoloFunction":
        """Real multiple a·F."""
        return replace(
            self,
            coeffs=self.coeffs * a,
            values=self.values * a,
            sub_values={f: [a * z for z in vals] for f, vals in self.sub_values.items()},
            diag_coeffs={f: [a * t for t in vals] for f, vals in self.diag_coeffs.items()},
        )

    def added(self, other: "THoloFunction") -> "THoloFunction":
        """Sum F + G of two functions of the same kind."""
        sub = {f: [x + y for x, y in zip(vals, other.sub_values.get(f, vals))] for f, vals in self.sub_values.items()}
        diag = {f: [x + y for x, y in zip(vals, other.diag_coeffs.get(f, vals))] for f, vals in self.diag_coeffs.items()}
        return replace(
            self,
            coeffs=self.coeffs + other.coeffs,
            values=self.values + other.values,
            sub_values=sub,
            diag_coeffs=diag,
            punctures=self.punctures | other.punctures,
        )

    def to_rows(self, te: TEmbedding) -> List[Tuple[str, str, float, float]]:
        """CSV rows (face id, color, Re, Im); projected faces store (t, 0)."""
        rows = []
        for i, f in enumerate(te.faces):
            if f.color is self.kind:
                z = self.values[i]
                rows.append((f.id, f.color.value, float(np.real(z)), float(np.imag(z))))
            else:
                rows.append((f.id, f.color.value, float(self.coeffs[i]), 0.0))
        return rows


def projection_coefficient(eta: complex, z: complex) -> float:
    """Real t with Pr(z, η ℝ) = t η."""
    return float(np.real(np.conj(eta) * z))


def constant_function(te: TEmbedding, eta: OrigamiField, c: complex, kind: Color = Color.WHITE,
                      splitting: Optional[Splitting] = None) -> THoloFunction:
    """The constant function F° ≡ c with F^•(b) = Pr(c, η_b ℝ)."""
    n = len(te.faces)
    coeffs = np.full(n, np.nan)
    values = np.full(n, np.nan + 0j, dtype=complex)
    for i, f in enumerate(te.faces):
        if f.color is kind:
            values[i] = c
        else:
            coeffs[i] = projection_coefficient(eta.eta[i], c)
    sub = {}
    diag = {}
    if splitting is not None:
        for f, sf in splitting.faces.items():
            sub[f] = [complex(c)] * len(sf.triangles)
            diag[f] = [projection_coefficient(splitting.diagonal_eta(te, eta, f, j), c) for j in range(len(sf.diagonals))]
    return THoloFunction(kind, eta, coeffs, values, sub, diag, set(), "none", splitting)


def contour_sum(te: TEmbedding, F: THoloFunction, face: int) -> Tuple[complex, float]:
    """Σ F^•(g) dT over the non-boundary sides of a face, with its scale Σ|t||dT|."""
    total = 0.0 + 0.0j
    scale = 0.0
    for u, v in te.faces[face].sides():
        g = te.neighbor(u, v)
        if g is None:
            continue
        t = F.coeffs[g]
        if np.isnan(t):
            continue
        dT = te.positions[v] - te.positions[u]
        total += t * F.eta.eta[g] * dT
        scale += abs(t) * abs(dT)
    return complex(total), scale


def check_tholomorphic(te: TEmbedding, F: THoloFunction, region: Optional[Iterable[int]] = None) -> DiagnosticsReport:
    """Projection and contour residuals of a t-holomorphic function.

    Args:
        te: The t-embedding
        F: Function to check
        region: Face indices to check (default: all faces)

    Returns:
        DiagnosticsReport with metrics max_projection and max_contour; the worst
        locations are in details
    """
    report = DiagnosticsReport(subject=f"t-holomorphicity ({F.kind.value}) on {te.name}")
    faces = set(region) if region is not None else set(range(len(te.faces)))
    scale = max(float(np.nanmax(np.abs(F.coeffs))) if np.any(~np.isnan(F.coeffs)) else 0.0, 1e-300)

    worst_proj, where_proj = 0.0, None
    for f in sorted(faces):
        if te.faces[f].color is not F.kind or f in F.punctures:
            continue
        for u, v in te.faces[f].sides():
            g = te.neighbor(u, v)
            if g is None or np.isnan(F.coeffs[g]):
                continue
            z = F.value_on_side(te, f, u, v)
            if np.isnan(z):
                continue
            r = abs(projection_coefficient(F.eta.eta[g], z) - F.coeffs[g]) / max(scale, abs(F.coeffs[g]), 1.0)
            if r > worst_proj:
                worst_proj, where_proj = r, te.faces[f].id
            if r > PROJECTION_TOL:
                report.add("projection", te.faces[f].id,
                           f"projection onto eta({te.faces[g].id}) off by {r:.3e}", value=float(r))

    worst_contour, where_contour = 0.0, None
    for f in sorted(faces):
        if te.faces[f].color is not F.kind or f in F.punctures:
            continue
        if f in te.boundary_faces and F.boundary != "standard":
            continue
        total, size = contour_sum(te, F, f)
        r = abs(total) / max(size, 1e-300) if size > 0 else 0.0
        if r > worst_contour:
            worst_contour, where_contour = r, te.faces[f].id
        if r > CONTOUR_TOL:
            report.add("contour", te.faces[f].id, f"contour integral {abs(total):.3e} does not vanish", value=float(r))

    report.metrics["max_projection"] = worst_proj
    report.metrics["max_contour"] = worst_contour
    report.details["worst_projection"] = where_proj
    report.details["worst_contour"] = where_contour
    logger.debug(f"t-holomorphicity check: projection {worst_proj:.2e} at {where_proj}, "
                 f"contour {worst_contour:.2e} at {where_contour}")
    return report


def involution(F: THoloFunction) -> THoloFunction:
    """F^• ↦ η² conj(F^•) on projected values; fixes every t-holomorphic field."""
    proj = F.projected_values()
    mapped = F.eta.eta2 * np.conj(proj)
    coeffs = np.real(np.conj(F.eta.eta) * mapped)
    coeffs = np.where(np.isnan(F.coeffs), np.nan, coeffs)
    return replace(F, coeffs=coeffs)
