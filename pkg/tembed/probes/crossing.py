"""Uniform crossing probes for the forward and backward T-graph walks.

ℛ(z, r) = z + [−3r, 3r] × [−r, r], B₁ = B(z − 2r, r/2), B₂ = B(z + 2r, r/2).
The probe estimates the probability that a walk started in B₁ hits B₂
before leaving ℛ.
"""
import logging
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy.spatial import Delaunay

from tembed.core.errors import ProbeError
from tembed.embedding.splitting import triangle_area
from tembed.probes.base import CONFIDENCE_SE, ProbeResult, proportion
from tembed.walks.backward import BackwardStructure
from tembed.walks.rates import Chain, WalkRates
from tembed.walks.simulate import hit_before_exit
from tembed.walks.tgraph import TGraph

logger = logging.getLogger(__name__)

MIN_SCALE = 10.0  # r must be at least this many mesh sizes


@dataclass(frozen=True)
class Rectangle:
    """ℛ(z, r) with its two discs."""
    center: complex
    r: float

    @property
    def corners(self) -> np.ndarray:
        z, r = self.center, self.r
        return np.array([z - 3 * r - 1j * r, z + 3 * r - 1j * r, z + 3 * r + 1j * r, z - 3 * r + 1j * r])

    def contains(self, z: np.ndarray) -> np.ndarray:
        d = np.asarray(z) - self.center
        return (np.abs(d.real) <= 3 * self.r) & (np.abs(d.imag) <= self.r)

    def in_b1(self, z: np.ndarray) -> np.ndarray:
        return np.abs(np.asarray(z) - (self.center - 2 * self.r)) <= 0.5 * self.r

    def in_b2(self, z: np.ndarray) -> np.ndarray:
        return np.abs(np.asarray(z) - (self.center + 2 * self.r)) <= 0.5 * self.r

    def to_dict(self) -> dict:
        return {"center": [self.center.real, self.center.imag], "r": self.r}


def _covered(rect: Rectangle, points: np.ndarray) -> bool:
    pts = points[~np.isnan(points)]
    if len(pts) < 3:
        return False
    hull = Delaunay(np.column_stack([pts.real, pts.imag]))
    corners = rect.corners
    return bool(np.all(hull.find_simplex(np.column_stack([corners.real, corners.imag])) >= 0))


def backward_chain(tg: TGraph, bs: BackwardStructure) -> Chain:
    """The reversed walk with states placed at their T-graph images."""
    chain = bs.chain()
    verts = sorted(bs.rates)
    positions = np.array([tg.images[v] for v in verts] + [np.nan], dtype=complex)
    return replace(chain, positions=positions)


def backward_weights(tg: TGraph, bs: BackwardStructure) -> np.ndarray:
    """μ(v) = area of the white (sub-)face w(v), per state of the reversed chain."""
    te = tg.te
    out = []
    for v in sorted(bs.rates):
        face, part = bs.owner_of.get(v, (None, None))
        if face is None:
            out.append(0.0)
        elif part is None:
            out.append(abs(float(te.areas[face])))
        else:
            tri = tg.splitting.faces[face].triangles[part]
            out.append(triangle_area(te.positions[list(tri)]))
    return np.array(out + [0.0])


def mc_crossing_probe(tg: TGraph, wr: WalkRates, center: complex, r: float, n_walks: int = 1000, seed: int = 0,
                      backward: Optional[BackwardStructure] = None, delta: Optional[float] = None) -> ProbeResult:
    """Estimate P(hit B₂ before exiting ℛ) from starts in B₁.

    Forward walkers start uniformly over the points in B₁; with a backward
    structure the reversed walk is used and starts are μ-weighted.

    Returns:
        ProbeResult with the estimate, its binomial standard error and the
        lower confidence bound in params; r < 10δ gives a "below_scale"
        result without an estimate

    Raises:
        ProbeError: if ℛ is not covered by the T-graph or B₁ holds no start
    """
    delta = float(tg.te.mesh_size if delta is None else delta)
    rect = Rectangle(complex(center), float(r))
    walk = "backward" if backward is not None else "forward"
    params = {"walk": walk, **rect.to_dict(), "delta": delta}
    if r < MIN_SCALE * delta:
        logger.warning(f"Crossing probe r={r:.4g} is below {MIN_SCALE:g}δ; no estimate")
        return ProbeResult("crossing", float("nan"), float("nan"), 0, params, seed, ["below_scale"])
    if not _covered(rect, tg.points):
        raise ProbeError("not_covered", f"rectangle around {center} with r={r} is not covered by the T-graph")

    if backward is None:
        chain = wr.chain
        live = ~chain.absorbing
        candidates = np.flatnonzero(rect.in_b1(chain.positions) & live)
        weights = np.ones(len(candidates))
    else:
        chain = backward_chain(tg, backward)
        live = ~chain.absorbing
        candidates = np.flatnonzero(rect.in_b1(chain.positions) & live)
        weights = backward_weights(tg, backward)[candidates]
    if not len(candidates) or weights.sum() <= 0:
        raise ProbeError("empty_disc", f"no {walk} walk state inside B1 of the rectangle")

    rng = np.random.default_rng([seed, 0])
    starts = rng.choice(candidates, size=n_walks, p=weights / weights.sum())
    positions = chain.positions
    finite = ~np.isnan(positions)
    target = np.zeros(chain.n_states, dtype=bool)
    region = np.zeros(chain.n_states, dtype=bool)
    target[finite] = rect.in_b2(positions[finite])
    region[finite] = rect.contains(positions[finite])
    hits = hit_before_exit(chain, starts, target, region, seed=seed)
    p, se = proportion(hits)
    params["lower_bound"] = max(p - CONFIDENCE_SE * se, 0.0)
    params["n_starts"] = int(len(candidates))
    result = ProbeResult("crossing", p, se, n_walks, params, seed)
    if params["lower_bound"] <= 0:
        result.flags.append("ci_includes_zero")
    logger.info(f"Crossing probe ({walk}) r={r:.4g}: p = {p:.3f} ± {se:.3f}")
    return result
