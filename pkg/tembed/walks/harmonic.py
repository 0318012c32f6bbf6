"""Harmonic functions on T-graphs and their derivatives."""
import logging
from typing import Iterable, Optional

import numpy as np

from tembed.core.errors import WalkError
from tembed.core.models import DiagnosticsReport, Flavor
from tembed.embedding.origami import OrigamiField
from tembed.holomorphy.extension import solve_from_projections
from tembed.holomorphy.functions import THoloFunction
from tembed.walks.rates import WalkRates
from tembed.walks.tgraph import TGraph

logger = logging.getLogger(__name__)

HARMONIC_TOL = 1e-9
AFFINE_TOL = 1e-9


def check_harmonic(tg: TGraph, wr: WalkRates, values: np.ndarray,
                   skip: Optional[Iterable[int]] = None) -> DiagnosticsReport:
    """Residual Σ q(v→v')(H(v') − H(v)) at every non-sink point.

    Args:
        tg: The T-graph
        wr: Its walk rates
        values: H per point (real or complex)
        skip: Points to leave out

    Returns:
        DiagnosticsReport; residuals are relative to Σ q|H(v') − H(v)| and the
        per-point values are in details["residuals"]
    """
    report = DiagnosticsReport(subject=f"harmonicity on {tg.te.name}")
    skip = set(skip or ())
    values = np.asarray(values)
    chain = wr.chain
    residuals = {}
    worst = 0.0
    for p in range(chain.n_states):
        if chain.absorbing[p] or p in skip:
            continue
        diff = values[chain.targets[p]] - values[p]
        total = np.sum(chain.rates[p] * diff)
        scale = np.sum(chain.rates[p] * np.abs(diff))
        r = float(abs(total) / scale) if scale > 0 else 0.0
        residuals[p] = r
        worst = max(worst, r)
        if r > HARMONIC_TOL:
            report.add("harmonic", str(p), f"drift {abs(total):.3e} at point {p}", value=r)
    report.details["residuals"] = residuals
    report.metrics["max_residual"] = worst
    return report


def direction_gamma(tg: TGraph) -> complex:
    """γ = α for black-flat and ᾱ for white-flat T-graphs; harmonic H take values in γℝ."""
    return tg.alpha if tg.flavor is Flavor.BLACK_FLAT else np.conj(tg.alpha)


def derivative_D(tg: TGraph, eta: OrigamiField, values: np.ndarray) -> THoloFunction:
    """Derivative of a harmonic function given on the vertices of T.

    Along the segment of a flattened face f, dH = D(f) dP with D(f) ∈ η_f ℝ.
    On an open face, D solves Re(γ̄ D ΔP) = Δh over its sides; on a collapsed
    one, D is the unique value projecting onto the neighbors' D(f_k).

    Args:
        tg: The T-graph
        eta: Unrotated origami square root function
        values: γℝ-valued (complex) or real h = Re(γ̄H) values per vertex of T

    Raises:
        WalkError: if H is not affine along some segment
    """
    te = tg.te
    gamma = direction_gamma(tg)
    values = np.asarray(values)
    h = np.real(np.conj(gamma) * values) if np.iscomplexobj(values) else values.astype(float)
    P = tg.images
    n = len(te.faces)
    coeffs = np.full(n, np.nan)
    out = np.full(n, np.nan + 0j, dtype=complex)
    flat = tg.flat_color

    for f in te.faces_of(flat):
        cycle = list(te.faces[f].cycle)
        proj = np.real(np.conj(gamma) * eta.eta[f] * P[cycle])
        if np.any(np.isnan(h[cycle])):
            continue
        lo, hi = int(np.argmin(proj)), int(np.argmax(proj))
        span = proj[hi] - proj[lo]
        if span <= 0:
            continue
        slope = (h[cycle[hi]] - h[cycle[lo]]) / span
        predicted = h[cycle[lo]] + slope * (proj - proj[lo])
        err = float(np.max(np.abs(predicted - h[cycle])))
        if err > AFFINE_TOL * max(1.0, float(np.max(np.abs(h[cycle])))):
            raise WalkError("not_harmonic", f"H is not affine along the segment of {te.faces[f].id}",
                            te.faces[f].id, err)
        coeffs[f] = slope
        out[f] = slope * eta.eta[f]

    collapsed = {f for f in te.faces_of(flat.other)
                 if len({int(tg.vertex_point[v]) for v in te.faces[f].cycle}) == 1}
    for f in te.faces_of(flat.other):
        face = te.faces[f]
        if f in collapsed:
            etas, ts = [], []
            for u, v in face.sides():
                g = te.neighbor(u, v)
                if g is not None and not np.isnan(coeffs[g]):
                    etas.append(eta.eta[g])
                    ts.append(coeffs[g])
            z, rank = solve_from_projections(etas, ts)
            out[f] = z if rank == 2 else complex(np.nan, np.nan)
            continue
        rows, rhs = [], []
        for u, v in face.sides():
            dP = np.conj(gamma) * (P[v] - P[u])
            rows.append([dP.real, -dP.imag])
            rhs.append(h[v] - h[u])
        if np.any(np.isnan(rhs)):
            continue
        sol, _, rank, _ = np.linalg.lstsq(np.array(rows), np.array(rhs), rcond=None)
        out[f] = complex(sol[0], sol[1]) if rank == 2 else complex(np.nan, np.nan)
    logger.debug(f"Derivative on {te.name}: {int(np.sum(~np.isnan(coeffs)))} segment slopes")
    return THoloFunction(flat.other, eta, coeffs, out)

