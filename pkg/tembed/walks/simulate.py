"""Exact-event simulation of continuous-time walks on a Chain."""
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from tembed.core.errors import WalkError
from tembed.walks.rates import Chain, WalkRates
from tembed.walks.tgraph import TGraph

logger = logging.getLogger(__name__)

MAX_STEPS = 10_000_000


@dataclass
class Trajectory:
    """Jump times and visited states of one walker."""
    walker: int
    times: np.ndarray
    states: np.ndarray
    positions: np.ndarray
    absorbed: bool

    @property
    def exit_state(self) -> Optional[int]:
        return int(self.states[-1]) if self.absorbed else None

    def to_rows(self) -> List[Tuple[int, float, float, float]]:
        """CSV rows (walker, time, x, y)."""
        return [(self.walker, float(t), float(z.real), float(z.imag)) for t, z in zip(self.times, self.positions)]


@dataclass
class EnsembleResult:
    """Positions of n walkers at checkpoint times and the running sup of |X_s − X_0|."""
    times: np.ndarray
    start: int
    positions: np.ndarray  # (n_times, n_walks) complex
    max_deviation: np.ndarray  # (n_times, n_walks)
    absorbed: np.ndarray  # (n_times, n_walks) bool
    seed: int
    origin: complex = 0j

    @property
    def displacements(self) -> np.ndarray:
        return self.positions - self.origin

    def trace_variance(self, i: int) -> Tuple[float, float]:
        """Tr Var(X_t) and a standard error from the second moments."""
        d = self.displacements[i]
        sq = np.abs(d - d.mean()) ** 2
        n = d.size
        return float(sq.sum() / (n - 1)), float(np.std(sq, ddof=1) / np.sqrt(n))


def _tables(chain: Chain) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Padded target and cumulative-probability tables with total rates."""
    width = max((len(t) for t in chain.targets), default=0)
    n = chain.n_states
    targets = np.zeros((n, max(width, 1)), dtype=int)
    cum = np.ones((n, max(width, 1)))
    totals = chain.total_rates
    for s in range(n):
        k = len(chain.targets[s])
        if k == 0 or totals[s] <= 0:
            targets[s, :] = s
            continue
        targets[s, :k] = chain.targets[s]
        targets[s, k:] = chain.targets[s][-1]
        cum[s, :k] = np.cumsum(chain.rates[s]) / totals[s]
    return targets, cum, totals


def simulate_walk(chain: Chain, start: int, horizon: Optional[float] = None, seed: int = 0,
                  walker: int = 0, max_steps: int = MAX_STEPS) -> Trajectory:
    """Simulate one walker until the horizon or absorption.

    The stream is seeded with (seed, walker) so that walkers are reproducible
    independently of how they are scheduled.

    Raises:
        WalkError: if the horizon is not positive
    """
    if horizon is not None and horizon <= 0:
        raise WalkError("bad_horizon", f"horizon must be positive, got {horizon}")
    rng = np.random.default_rng([seed, walker])
    totals = chain.total_rates
    t = 0.0
    state = start
    times = [0.0]
    states = [start]
    for _ in range(max_steps):
        if chain.absorbing[state] or totals[state] <= 0:
            break
        dt = rng.exponential(1.0 / totals[state])
        if horizon is not None and t + dt > horizon:
            break
        t += dt
        probs = chain.rates[state] / totals[state]
        state = int(chain.targets[state][rng.choice(len(probs), p=probs)])
        times.append(t)
        states.append(state)
    else:
        logger.warning(f"Walker {walker} hit the step limit {max_steps}")
    states = np.array(states, dtype=int)
    return Trajectory(walker, np.array(times), states, chain.positions[states], bool(chain.absorbing[state]))


def simulate_ensemble(chain: Chain, start: int, times: Sequence[float], n_walks: int, seed: int = 0,
                      max_steps: int = MAX_STEPS) -> EnsembleResult:
    """Run n_walks walkers from one state together, recording checkpoints.

    A single generator default_rng(seed) drives the vectorized loop, so the
    result depends only on the seed.

    Raises:
        WalkError: if a checkpoint time is not positive
    """
    times = np.asarray(sorted(times), dtype=float)
    if len(times) and times[0] <= 0:
        raise WalkError("bad_horizon", "checkpoint times must be positive")
    rng = np.random.default_rng(seed)
    targets, cum, totals = _tables(chain)
    n_t = len(times)
    state = np.full(n_walks, start, dtype=int)
    clock = np.zeros(n_walks)
    origin = chain.positions[start]
    sup = np.zeros(n_walks)
    checkpoint = np.zeros(n_walks, dtype=int)
    positions = np.full((n_t, n_walks), np.nan + 0j, dtype=complex)
    deviation = np.full((n_t, n_walks), np.nan)
    absorbed = np.zeros((n_t, n_walks), dtype=bool)

    active = np.arange(n_walks)
    steps = 0
    while active.size and steps < max_steps:
        steps += 1
        s = state[active]
        rate = totals[s]
        dt = np.full(active.size, np.inf)
        moving = rate > 0
        dt[moving] = rng.exponential(size=int(moving.sum())) / rate[moving]
        t_next = clock[active] + dt
        for j in range(n_t):
            hit = (checkpoint[active] == j) & (times[j] < t_next)
            if not np.any(hit):
                continue
            idx = active[hit]
            positions[j, idx] = chain.positions[state[idx]]
            deviation[j, idx] = sup[idx]
            absorbed[j, idx] = chain.absorbing[state[idx]]
            checkpoint[idx] += 1
        still = checkpoint[active] < n_t
        active = active[still]
        if not active.size:
            break
        u = rng.random(active.size)
        s = state[active]
        choice = (cum[s] < u[:, None]).sum(axis=1)
        choice = np.minimum(choice, targets.shape[1] - 1)
        state[active] = targets[s, choice]
        clock[active] = t_next[still]
        sup[active] = np.maximum(sup[active], np.abs(chain.positions[state[active]] - origin))
    if active.size:
        logger.warning(f"{active.size} walkers hit the step limit {max_steps}")
    result = EnsembleResult(times, start, positions, deviation, absorbed, seed, complex(origin))
    logger.info(f"Simulated {n_walks} walkers to t={times[-1] if n_t else 0:.4g} in {steps} rounds")
    return result


def concentration_bound(lam: float, t: float, delta: float) -> float:
    """4 exp(−½λ²(1 + ⅔δλt^{−1/2})^{−1}), the tail bound for sup_{s≤t}|X_s − X_0| ≥ 2λ√t."""
    return float(4 * np.exp(-0.5 * lam ** 2 / (1 + 2.0 / 3.0 * delta * lam / np.sqrt(t))))


def exit_distribution(chain: Chain, interior: Sequence[int]) -> Dict[int, Dict[int, float]]:
    """Exit law of the jump chain from each interior state into the complement.

    Solves (I − P_II) X = P_IE.
    """
    interior = list(interior)
    index = {s: i for i, s in enumerate(interior)}
    exits = sorted({int(t) for s in interior for t in chain.targets[s] if int(t) not in index})
    e_index = {s: i for i, s in enumerate(exits)}
    n, m = len(interior), len(exits)
    A = np.eye(n)
    B = np.zeros((n, m))
    for s in interior:
        i = index[s]
        probs = chain.jump_probabilities(s)
        for t, p in zip(chain.targets[s], probs):
            t = int(t)
            if t in index:
                A[i, index[t]] -= p
            else:
                B[i, e_index[t]] += p
    X = np.linalg.solve(A, B) if n else B
    return {s: {e: float(X[index[s], e_index[e]]) for e in exits if X[index[s], e_index[e]] > 0}
            for s in interior}


def segment_path_law(tg: TGraph, wr: WalkRates, start: int, k: int) -> Dict[Tuple[str, ...], float]:
    """Exact law of the first k labels (owning face, collapsed face or sink) visited from a point.

    Each leg runs the jump chain inside the points carrying the current
    label until it leaves them; the label sequence does not depend on the
    splitting used to build the T-graph.
    """
    chain = wr.chain
    labels = [tg.label(p) for p in range(tg.n_points)]
    groups: Dict[str, List[int]] = {}
    for p, lab in enumerate(labels):
        groups.setdefault(lab, []).append(p)
    cache: Dict[str, Dict[int, Dict[int, float]]] = {}

    law: Dict[Tuple[Tuple[str, ...], int], float] = {((labels[start],), start): 1.0}
    for _ in range(k - 1):
        nxt: Dict[Tuple[Tuple[str, ...], int], float] = {}
        for (path, p), mass in law.items():
            lab = path[-1]
            if lab == "sink":
                nxt[(path, p)] = nxt.get((path, p), 0.0) + mass
                continue
            if lab not in cache:
                cache[lab] = exit_distribution(chain, groups[lab])
            for e, pe in cache[lab][p].items():
                key = (path + (labels[e],), e)
                nxt[key] = nxt.get(key, 0.0) + mass * pe
        law = nxt
    out: Dict[Tuple[str, ...], float] = {}
    for (path, _), mass in law.items():
        out[path] = out.get(path, 0.0) + mass
    return out


def hit_before_exit(chain: Chain, starts: Sequence[int], target: np.ndarray, region: np.ndarray, seed: int = 0,
                    max_steps: int = MAX_STEPS) -> np.ndarray:
    """Whether each jump-chain walker reaches `target` before leaving `region` or being absorbed.

    Only the embedded jump chain is simulated; holding times do not affect
    the event. target and region are boolean masks over states.
    """
    rng = np.random.default_rng(seed)
    targets, cum, totals = _tables(chain)
    state = np.asarray(starts, dtype=int).copy()
    hit = np.zeros(len(state), dtype=bool)
    active = np.arange(len(state))
    steps = 0
    while active.size and steps < max_steps:
        s = state[active]
        done = target[s] | ~region[s] | chain.absorbing[s] | (totals[s] <= 0)
        hit[active[done]] = target[s[done]]
        active = active[~done]
        if not active.size:
            break
        steps += 1
        s = state[active]
        u = rng.random(active.size)
        choice = np.minimum((cum[s] < u[:, None]).sum(axis=1), targets.shape[1] - 1)
        state[active] = targets[s, choice]
    if active.size:
        logger.warning(f"{active.size} walkers hit the step limit {max_steps} before leaving the region")
    logger.debug(f"Hit-before-exit: {int(hit.sum())}/{len(hit)} walkers reached the target in {steps} rounds")
    return hit
