"""Oscillation profiles and the gradient dichotomy for harmonic and t-holomorphic fields."""
import logging
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.spatial.distance import pdist

from tembed.core.errors import ProbeError
from tembed.embedding.origami import OrigamiField
from tembed.embedding.tembedding import TEmbedding
from tembed.holomorphy.functions import THoloFunction
from tembed.probes.base import ProbeResult
from tembed.walks.harmonic import derivative_D
from tembed.walks.tgraph import TGraph

logger = logging.getLogger(__name__)

MIN_RADII = 3


def face_samples(te: TEmbedding, F: THoloFunction) -> Tuple[np.ndarray, np.ndarray]:
    """Centroids and true values of the faces where F has them."""
    pos, val = [], []
    for f in te.faces_of(F.kind):
        z = F.values[f]
        if np.isnan(z):
            continue
        pos.append(te.positions[list(te.faces[f].cycle)].mean())
        val.append(z)
    return np.array(pos, dtype=complex), np.array(val, dtype=complex)


def oscillation(values: np.ndarray) -> float:
    """max |f(x) − f(y)| over a finite set of values."""
    values = np.asarray(values, dtype=complex)
    if len(values) < 2:
        return 0.0
    return float(np.max(pdist(np.column_stack([values.real, values.imag]))))


def oscillation_profile(positions: np.ndarray, values: np.ndarray, center: complex,
                        radii: Sequence[float], name: str = "field") -> ProbeResult:
    """osc over B(center, r) for each radius, with a log-log fit of osc ∝ r^β.

    Args:
        positions: Sample positions (T-graph points for harmonic H, face centroids for F)
        values: Real or complex values at the positions
        center: Center of the balls
        radii: Radius ladder
        name: Label recorded in params

    Returns:
        ProbeResult with β̂ as estimate, its regression standard error, R² in
        params and the osc table; a field with zero oscillation everywhere
        gives β̂ = NaN and the "constant" flag

    Raises:
        ProbeError: if fewer than three radii are given
    """
    radii = np.sort(np.asarray(radii, dtype=float))
    if len(radii) < MIN_RADII:
        raise ProbeError("too_few_radii", f"oscillation profile needs at least {MIN_RADII} radii, got {len(radii)}")
    positions = np.asarray(positions, dtype=complex)
    values = np.asarray(values)
    keep = ~np.isnan(values)
    positions, values = positions[keep], values[keep]
    dist = np.abs(positions - center)
    table = []
    for r in radii:
        inside = dist <= r
        table.append({"r": float(r), "osc": oscillation(values[inside]), "n_points": int(inside.sum())})
    osc = np.array([row["osc"] for row in table])
    params = {"field": name, "center": [float(np.real(center)), float(np.imag(center))], "radii": radii.tolist()}
    usable = osc > 0
    if usable.sum() < 2:
        logger.debug(f"Oscillation profile of {name}: constant on every ball")
        return ProbeResult("oscillation", float("nan"), 0.0, len(values), params, None, ["constant"], table)

    x, y = np.log(radii[usable]), np.log(osc[usable])
    (slope, intercept), cov = np.polyfit(x, y, 1, cov=True) if usable.sum() > 2 else (np.polyfit(x, y, 1), None)
    fit = slope * x + intercept
    ss_res = float(np.sum((y - fit) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    params["r_squared"] = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    params["intercept"] = float(intercept)
    stderr = float(np.sqrt(cov[0, 0])) if cov is not None else 0.0
    flags = [] if usable.all() else ["zero_oscillation_radii"]
    logger.info(f"Oscillation profile of {name}: β̂ = {slope:.3f}, R² = {params['r_squared']:.3f}")
    return ProbeResult("oscillation", float(slope), stderr, len(values), params, None, flags, table)


def lipschitz_dichotomy(tg: TGraph, eta: OrigamiField, values: np.ndarray, center: complex, d: float,
                        delta: Optional[float] = None) -> ProbeResult:
    """Which side of the gradient dichotomy a harmonic function is on.

    With ρ = d·max_{B(center, d/2)}|D[H]| / osc_{B(center, d)}H, the instance
    is "lipschitz" when log ρ < d/(2δ) and "blow-up" otherwise.

    Args:
        tg: The T-graph
        eta: Unrotated origami square root function
        values: H per vertex of T
        center: Center on the T-graph
        d: Radius of the outer ball
        delta: Mesh size (default: that of the t-embedding)
    """
    te = tg.te
    delta = float(te.mesh_size if delta is None else delta)
    D = derivative_D(tg, eta, values)
    values = np.asarray(values)
    dist_v = np.abs(tg.images - center)
    osc = oscillation(values[(dist_v <= d) & ~np.isnan(values)])
    grads = []
    for f in range(len(te.faces)):
        z = D.values[f] if not np.isnan(D.values[f]) else D.projected(f) if not np.isnan(D.coeffs[f]) else np.nan
        if np.isnan(z):
            continue
        c = tg.images[list(te.faces[f].cycle)].mean()
        if abs(c - center) <= 0.5 * d:
            grads.append(abs(z))
    grad = max(grads) if grads else 0.0
    params = {"center": [float(np.real(center)), float(np.imag(center))], "d": float(d), "delta": delta,
              "max_gradient": grad, "osc": osc}
    if osc <= 0:
        return ProbeResult("lipschitz", float("nan"), 0.0, len(grads), params, None, ["constant"])
    rho = d * grad / osc
    params["branch"] = "lipschitz" if np.log(max(rho, 1e-300)) < d / (2 * delta) else "blow-up"
    logger.info(f"Gradient dichotomy at d={d:.4g}: ρ = {rho:.3g} ({params['branch']})")
    return ProbeResult("lipschitz", float(rho), 0.0, len(grads), params)
