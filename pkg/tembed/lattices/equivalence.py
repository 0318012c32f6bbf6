"""Translations between lattice notions of discrete holomorphicity.

Square grid: Ferrand values on black squares, s-holomorphic values on the
diamond corners (vertices with i + j odd) and t-white-holomorphic
functions with the diamond splitting. Honeycomb: Dynnikov–Novikov values
on white triangles and t-black-holomorphic functions. Orthodiagonal ∂̄ and
the CGS edge relations are checked in their own framework only.
"""
import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, Optional, Tuple

import numpy as np

from tembed.core.errors import LatticeError
from tembed.core.models import Color
from tembed.holomorphy.extension import extend_projections
from tembed.holomorphy.functions import THoloFunction, check_tholomorphic, projection_coefficient
from tembed.lattices.base import LatticeBundle
from tembed.lattices.cgs import cgs_relations, edge_values, shol_residual
from tembed.lattices.orthodiagonal import ortho_operators
from tembed.lattices.square import diamond_corners, diamond_splitting, square_class, square_line

logger = logging.getLogger(__name__)

FRAMEWORKS = ("ferrand", "s-hol", "ortho-dbar", "dynnikov-novikov", "cgs", "t-hol")
SUPPORT = {
    "ferrand": "black squares",
    "s-hol": "diamond corners",
    "ortho-dbar": "lambda",
    "dynnikov-novikov": "white triangles",
    "cgs": "rhombi",
    "t-hol": "faces",
}


@dataclass
class LatticeFunctionField:
    """Values of a discrete holomorphic function in one framework.

    values are indexed by faces of T (ferrand, dynnikov-novikov), vertices
    of T (s-hol), vertices of Λ (ortho-dbar) or rhombi (cgs); t-hol fields
    carry the THoloFunction itself and values = its coefficients.
    """
    framework: str
    values: np.ndarray
    function: Optional[THoloFunction] = None
    data: Any = None  # CGSData for cgs fields

    def __post_init__(self):
        if self.framework not in FRAMEWORKS:
            raise LatticeError("unknown_framework", f"unknown framework tag {self.framework!r}")

    @property
    def support(self) -> str:
        return SUPPORT[self.framework]

    def to_dict(self) -> dict:
        finite = np.asarray(self.values)[~np.isnan(self.values)] if len(self.values) else np.zeros(0)
        return {
            "framework": self.framework,
            "support": self.support,
            "n_values": int(len(finite)),
            "max_abs": float(np.max(np.abs(finite))) if len(finite) else 0.0,
        }


@dataclass
class EquivalenceReport:
    """A translated field with the defining residual of both frameworks."""
    source: str
    target: str
    translated: LatticeFunctionField
    source_residual: float
    target_residual: float
    round_trip: Optional[float] = None

    @property
    def ok(self) -> bool:
        return max(self.source_residual, self.target_residual) <= 1e-9

    def to_dict(self) -> dict:
        return {
            "source": self.source,
            "target": self.target,
            "source_residual": self.source_residual,
            "target_residual": self.target_residual,
            "round_trip": self.round_trip,
            "ok": self.ok,
            "translated": self.translated.to_dict(),
        }


def _require(bundle: LatticeBundle, kind: str):
    if bundle.kind != kind:
        raise LatticeError("domain_mismatch", f"framework needs a {kind} lattice, got {bundle.kind}")


def _max(values) -> float:
    values = [abs(v) for v in values if not np.isnan(v)]
    return float(max(values)) if values else 0.0


# ----------------------------------------------------------------------
# Residuals


def ferrand_residual(bundle: LatticeBundle, values: np.ndarray) -> float:
    """F(n, m+1) − F(n, m−1) − i(F(n+1, m) − F(n−1, m)) at interior white squares.

    Also counts the imaginary part on B_R and the real part on B_I.
    """
    _require(bundle, "square")
    grid = bundle.data
    F = np.asarray(values, dtype=complex)
    out = []
    for (p, q), f in grid.face.items():
        cls = square_class(p, q)
        if cls == "B_R":
            out.append(F[f].imag)
        elif cls == "B_I":
            out.append(F[f].real)
        else:
            around = [grid.face.get(k) for k in ((p, q + 1), (p, q - 1), (p + 1, q), (p - 1, q))]
            if None in around:
                continue
            up, down, right, left = (F[k] for k in around)
            out.append(up - down - 1j * (right - left))
    return _max(out)


def shol_square_residual(bundle: LatticeBundle, values: np.ndarray) -> float:
    """|Pr(F(z1), η(s)ℝ) − Pr(F(z2), η(s)ℝ)| over squares with both diamond corners defined."""
    _require(bundle, "square")
    grid = bundle.data
    F = np.asarray(values, dtype=complex)
    out = []
    for (p, q) in grid.face:
        z1, z2 = diamond_corners(grid, p, q)
        if np.isnan(F[z1]) or np.isnan(F[z2]):
            continue
        line = square_line(p, q)
        out.append(projection_coefficient(line, F[z1]) - projection_coefficient(line, F[z2]))
    return _max(out)


def dn_residuals(bundle: LatticeBundle, values: np.ndarray) -> Dict[int, float]:
    """Σ G(w) over the three white neighbors of each interior black triangle."""
    te = bundle.te
    G = np.asarray(values, dtype=float)
    out = {}
    for b in te.black:
        whites = [te.neighbor(u, v) for u, v in te.faces[b].sides()]
        if None in whites:
            continue
        out[b] = float(abs(sum(G[w] for w in whites)))
    return out


def thol_residual(bundle: LatticeBundle, F: THoloFunction) -> float:
    report = check_tholomorphic(bundle.te, F)
    return max(report.metrics["max_projection"], report.metrics["max_contour"])


def field_residual(bundle: LatticeBundle, field_: LatticeFunctionField) -> float:
    """The defining residual of a field in its own framework."""
    fw = field_.framework
    if fw == "ferrand":
        return ferrand_residual(bundle, field_.values)
    if fw == "s-hol":
        return shol_square_residual(bundle, field_.values)
    if fw == "t-hol":
        return thol_residual(bundle, field_.function)
    if fw == "dynnikov-novikov":
        return max(dn_residuals(bundle, field_.values).values(), default=0.0)
    if fw == "ortho-dbar":
        ops = ortho_operators(bundle.data, field_.values)
        return float(np.max(np.abs(ops.dbar))) if len(ops.dbar) else 0.0
    relations = cgs_relations(field_.data, edge_values(field_.data, field_.values))
    return max(shol_residual(field_.data, field_.values), relations.metrics["max_edge_relation"],
               relations.metrics["max_sum"])


# ----------------------------------------------------------------------
# Translations


def ferrand_to_shol(bundle: LatticeBundle, field_: LatticeFunctionField) -> LatticeFunctionField:
    """F_⋄(i, j) = F(black (i, j−1)) + F(black (i−1, j)); NaN where a black is missing."""
    grid = bundle.data
    F = np.asarray(field_.values, dtype=complex)
    out = np.full(bundle.te.n_vertices, np.nan + 0j, dtype=complex)
    for (i, j), v in grid.vertex.items():
        if (i + j) % 2 == 0:
            continue
        a, b = grid.face.get((i, j - 1)), grid.face.get((i - 1, j))
        if a is not None and b is not None:
            out[v] = F[a] + F[b]
    return LatticeFunctionField("s-hol", out)


def shol_to_ferrand(bundle: LatticeBundle, field_: LatticeFunctionField) -> LatticeFunctionField:
    """F(b_R) = Re F_⋄ and F(b_I) = i·Im F_⋄ at a corner of the black square."""
    grid = bundle.data
    F = np.asarray(field_.values, dtype=complex)
    out = np.full(len(bundle.te.faces), np.nan + 0j, dtype=complex)
    for (p, q), f in grid.face.items():
        cls = square_class(p, q)
        if cls not in ("B_R", "B_I"):
            continue
        known = [F[z] for z in diamond_corners(grid, p, q) if not np.isnan(F[z])]
        if not known:
            continue
        z = known[0]
        out[f] = z.real if cls == "B_R" else 1j * z.imag
    return LatticeFunctionField("ferrand", out)


def shol_to_thol(bundle: LatticeBundle, field_: LatticeFunctionField) -> LatticeFunctionField:
    """t-white-holomorphic function with the diamond splitting and F_⋄ as sub-triangle values."""
    te, eta = bundle.te, bundle.eta
    grid = bundle.data
    splitting = diamond_splitting(bundle)
    F = np.asarray(field_.values, dtype=complex)
    n = len(te.faces)
    coeffs = np.full(n, np.nan)
    values = np.full(n, np.nan + 0j, dtype=complex)
    for (p, q), f in grid.face.items():
        if te.faces[f].color is not Color.BLACK:
            continue
        known = [F[z] for z in diamond_corners(grid, p, q) if not np.isnan(F[z])]
        if known:
            coeffs[f] = projection_coefficient(eta.eta[f], known[0])
    sub: Dict[int, list] = {}
    diag: Dict[int, list] = {}
    for f, sf in splitting.faces.items():
        subs = []
        for tri in sf.triangles:
            off = [x for x in tri if x not in sf.diagonals[0]]
            subs.append(complex(F[off[0]]))
        sub[f] = subs
        diag[f] = [projection_coefficient(splitting.diagonal_eta(te, eta, f, j), subs[j])
                   for j in range(len(sf.diagonals))]
        finite = [z for z in subs if not np.isnan(z)]
        values[f] = finite[0] if finite else complex(np.nan, np.nan)
    fn = THoloFunction(Color.WHITE, eta, coeffs, values, sub, diag, set(), "none", splitting)
    return LatticeFunctionField("t-hol", coeffs, function=fn)


def thol_to_shol(bundle: LatticeBundle, field_: LatticeFunctionField) -> LatticeFunctionField:
    """F_⋄(z) is the value of the white sub-triangle with z off its diagonal."""
    F = field_.function
    if F is None or F.kind is not Color.WHITE or F.splitting is None:
        raise LatticeError("domain_mismatch", "square-grid translation needs a split t-white-holomorphic function")
    acc: Dict[int, list] = {}
    for f, sf in F.splitting.faces.items():
        for j, tri in enumerate(sf.triangles):
            z = F.sub_values.get(f, [np.nan] * len(sf.triangles))[j]
            if np.isnan(z):
                continue
            for x in tri:
                if x not in sf.diagonals[0]:
                    acc.setdefault(x, []).append(z)
    out = np.full(bundle.te.n_vertices, np.nan + 0j, dtype=complex)
    for v, zs in acc.items():
        out[v] = np.mean(zs)
    return LatticeFunctionField("s-hol", out)


def thol_to_dn(bundle: LatticeBundle, field_: LatticeFunctionField) -> LatticeFunctionField:
    """G(w) = η̄_w F°(w) = t_w for a t-black-holomorphic function."""
    F = field_.function
    if F is None or F.kind is not Color.BLACK:
        raise LatticeError("domain_mismatch", "honeycomb translation needs a t-black-holomorphic function")
    G = np.full(len(bundle.te.faces), np.nan)
    for w in bundle.te.white:
        G[w] = F.coeffs[w]
    return LatticeFunctionField("dynnikov-novikov", G)


def dn_to_thol(bundle: LatticeBundle, field_: LatticeFunctionField) -> LatticeFunctionField:
    coeffs = np.full(len(bundle.te.faces), np.nan)
    for w in bundle.te.white:
        coeffs[w] = field_.values[w]
    fn = extend_projections(bundle.te, bundle.eta, coeffs, Color.BLACK)
    return LatticeFunctionField("t-hol", fn.coeffs, function=fn)


def _identity(bundle: LatticeBundle, field_: LatticeFunctionField) -> LatticeFunctionField:
    return field_


def _compose(*steps: Callable) -> Callable:
    def run(bundle: LatticeBundle, field_: LatticeFunctionField) -> LatticeFunctionField:
        for step in steps:
            field_ = step(bundle, field_)
        return field_
    return run


_TRANSLATIONS: Dict[Tuple[str, str, str], Callable] = {
    ("square", "ferrand", "s-hol"): ferrand_to_shol,
    ("square", "s-hol", "ferrand"): shol_to_ferrand,
    ("square", "s-hol", "t-hol"): shol_to_thol,
    ("square", "t-hol", "s-hol"): thol_to_shol,
    ("square", "ferrand", "t-hol"): _compose(ferrand_to_shol, shol_to_thol),
    ("square", "t-hol", "ferrand"): _compose(thol_to_shol, shol_to_ferrand),
    ("honeycomb", "t-hol", "dynnikov-novikov"): thol_to_dn,
    ("honeycomb", "dynnikov-novikov", "t-hol"): dn_to_thol,
    ("orthodiagonal", "ortho-dbar", "ortho-dbar"): _identity,
    ("honeycomb", "cgs", "cgs"): _identity,
}


def _difference(a: LatticeFunctionField, b: LatticeFunctionField) -> float:
    x, y = np.asarray(a.values, dtype=complex), np.asarray(b.values, dtype=complex)
    mask = ~np.isnan(x) & ~np.isnan(y)
    return float(np.max(np.abs(x[mask] - y[mask]))) if np.any(mask) else 0.0


def holomorphy_equivalence(bundle: LatticeBundle, field_: LatticeFunctionField, target: str) -> EquivalenceReport:
    """Translate a field to another framework and evaluate both defining residuals.

    When the reverse translation exists, the report also carries the largest
    difference between the field and its round trip on entries defined in both.

    Raises:
        LatticeError: if the lattice has no correspondence between the two frameworks
    """
    key = (bundle.kind, field_.framework, target)
    step = _TRANSLATIONS.get(key)
    if step is None:
        raise LatticeError("unsupported_pair", f"no correspondence {field_.framework} -> {target} "
                                               f"on {bundle.kind} lattices")
    translated = step(bundle, field_)
    source_res = field_residual(bundle, field_)
    target_res = field_residual(bundle, translated)
    round_trip = None
    back = _TRANSLATIONS.get((bundle.kind, target, field_.framework))
    if back is not None and back is not _identity:
        round_trip = _difference(field_, back(bundle, translated))
    logger.info(f"Equivalence {field_.framework} -> {target} on {bundle.te.name}: residuals "
                f"{source_res:.2e} / {target_res:.2e}"
                + (f", round trip {round_trip:.2e}" if round_trip is not None else ""))
    return EquivalenceReport(field_.framework, target, translated, source_res, target_res, round_trip)
