"""Directional variance, tail and isotropy probes of the T-graph walk.

For the walk X on a T-graph, Tr Var(X_t) = t; the directional variances
Var(Re(β̄(X_t − X_0))) stay bounded below by a multiple of δ² once
t ≳ δ², and sup_{s≤t}|X_s − X_0| has Bennett-type tails. Each probe
reports an estimate with a standard error and never asserts a constant.
"""
import logging
from typing import List, Optional, Sequence

import numpy as np

from tembed.core.errors import ProbeError
from tembed.probes.base import CONFIDENCE_SE, ProbeResult, central_point, proportion
from tembed.walks.rates import WalkRates
from tembed.walks.simulate import EnsembleResult, concentration_bound, simulate_ensemble
from tembed.walks.tgraph import TGraph

logger = logging.getLogger(__name__)

DEFAULT_LAMBDAS = (1.0, 2.0, 3.0)


def _flags(t: float, delta: float, absorbed: np.ndarray) -> List[str]:
    flags = []
    if t < delta ** 2:
        flags.append("below_scale")
    if np.any(absorbed):
        flags.append("absorbed")
    return flags


def directional_variance(d: np.ndarray, beta: complex) -> ProbeResult:
    """Var(Re(β̄ d)) with the standard error of the sample variance."""
    beta = complex(beta) / abs(beta)
    x = np.real(np.conj(beta) * d)
    n = len(x)
    sq = (x - x.mean()) ** 2
    return ProbeResult("variance", float(np.var(x, ddof=1)), float(np.std(sq, ddof=1) / np.sqrt(n)), n,
                       {"beta": [beta.real, beta.imag]})


def isotropy(ens: EnsembleResult, i: int) -> ProbeResult:
    """2×2 covariance of X_t − X_0 and its anisotropy ratio λ_max/λ_min."""
    d = ens.displacements[i]
    cov = np.cov(np.vstack([d.real, d.imag]))
    eig = np.linalg.eigvalsh(cov)
    ratio = float(eig[-1] / eig[0]) if eig[0] > 0 else float("inf")
    return ProbeResult("isotropy", ratio, 0.0, d.size,
                       {"t": float(ens.times[i]), "covariance": cov.tolist(), "trace": float(np.trace(cov))},
                       ens.seed)


def mc_variance_probe(tg: TGraph, wr: WalkRates, t_values: Sequence[float],
                      beta_values: Sequence[complex] = (1.0, 1j), n_walks: int = 2000, seed: int = 0,
                      start: Optional[int] = None, lambdas: Sequence[float] = DEFAULT_LAMBDAS,
                      delta: Optional[float] = None) -> List[ProbeResult]:
    """Monte Carlo variance, trace, isotropy and tail estimates at each time t.

    Args:
        tg: T-graph (whole-plane or large enough for walkers to stay away from sinks)
        wr: Its walk rates
        t_values: Checkpoint times
        beta_values: Directions β of the directional variances
        n_walks: Number of walkers
        seed: Seed of the ensemble generator
        start: Starting point (default: the central point)
        lambdas: λ values of the tail estimates
        delta: Mesh size (default: that of the t-embedding)

    Returns:
        ProbeResults in time order: per t the directional variances, the
        trace, the isotropy and one tail result per λ. Times below δ² carry
        the "below_scale" flag; runs where walkers were absorbed carry "absorbed".

    Raises:
        ProbeError: if there are fewer than two walkers or no times
    """
    if n_walks < 2 or not len(t_values):
        raise ProbeError("bad_parameters", "variance probe needs at least two walkers and one time")
    delta = float(tg.te.mesh_size if delta is None else delta)
    start = central_point(tg, wr) if start is None else start
    ens = simulate_ensemble(wr.chain, start, t_values, n_walks, seed)
    results: List[ProbeResult] = []
    for i, t in enumerate(ens.times):
        flags = _flags(t, delta, ens.absorbed[i])
        if "below_scale" in flags:
            logger.warning(f"Variance probe at t={t:.4g} is below the scale δ²={delta ** 2:.4g}")
        d = ens.displacements[i]
        for beta in beta_values:
            r = directional_variance(d, beta)
            r.params.update({"t": float(t), "start": start})
            r.seed, r.flags = seed, list(flags)
            results.append(r)
        tr, se = ens.trace_variance(i)
        trace = ProbeResult("trace", tr, se, n_walks, {"t": float(t), "expected": float(t), "start": start},
                            seed, list(flags))
        if abs(tr - t) > CONFIDENCE_SE * se:
            trace.flags.append("trace_mismatch")
        results.append(trace)
        iso = isotropy(ens, i)
        iso.flags = list(flags)
        results.append(iso)
        for lam in lambdas:
            p, se = proportion(ens.max_deviation[i] >= 2 * lam * np.sqrt(t))
            bound = concentration_bound(lam, t, delta)
            tail = ProbeResult("tail", p, se, n_walks, {"t": float(t), "lambda": float(lam), "bound": bound},
                               seed, list(flags))
            if p > bound + CONFIDENCE_SE * se:
                tail.flags.append("bound_violated")
            results.append(tail)
        logger.info(f"Variance probe t={t:.4g}: trace {tr:.4g} ± {se:.2g} (expected {t:.4g})")
    return results
