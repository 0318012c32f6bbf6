"""Jump rates of the T-graph random walk and its area measure."""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import networkx as nx
import numpy as np

from tembed.core.errors import WalkError
from tembed.core.models import DiagnosticsReport
from tembed.walks.tgraph import TGraph

logger = logging.getLogger(__name__)

RATE_TOL = 1e-10  # relative, geometric vs tangent rates
STATIONARITY_TOL = 1e-9
DEEP_DISTANCE = 3


@dataclass
class Chain:
    """Continuous-time Markov chain on finitely many states."""
    positions: np.ndarray  # complex position per state
    targets: List[np.ndarray]
    rates: List[np.ndarray]
    absorbing: np.ndarray  # bool per state

    @property
    def n_states(self) -> int:
        return len(self.positions)

    @property
    def total_rates(self) -> np.ndarray:
        return np.array([r.sum() if len(r) else 0.0 for r in self.rates])

    def jump_probabilities(self, state: int) -> np.ndarray:
        r = self.rates[state]
        return r / r.sum()


@dataclass
class WalkRates:
    """Rates on the points of a T-graph."""
    chain: Chain
    kinds: List[str]  # "segment", "degenerate" or "sink" per point
    masses: Dict[int, List[float]] = field(default_factory=dict)  # m_k at degenerate points
    splitting_id: str = "none"
    tangent_report: Optional[DiagnosticsReport] = None

    def to_dict(self) -> dict:
        return {
            "splitting": self.splitting_id,
            "rates": {
                str(p): {str(int(t)): float(q) for t, q in zip(self.chain.targets[p], self.chain.rates[p])}
                for p in range(self.chain.n_states) if self.kinds[p] != "sink"
            },
            "masses": {str(p): m for p, m in sorted(self.masses.items())},
        }


def segment_rates(z: complex, z_minus: complex, z_plus: complex):
    """q(v→v±) = 1/(|v± − v|·|v+ − v−|)."""
    span = abs(z_plus - z_minus)
    return 1.0 / (abs(z_minus - z) * span), 1.0 / (abs(z_plus - z) * span)


def walk_rates(tg: TGraph) -> WalkRates:
    """Rates for every non-sink point of the T-graph.

    Points inside a segment jump to its two endpoints; a collapsed face jumps
    to the far endpoints v_k of its incident segments with rate m_k/|v_k − v|².
    """
    n = tg.n_points
    targets: List[np.ndarray] = [np.empty(0, dtype=int)] * n
    rates: List[np.ndarray] = [np.empty(0)] * n
    kinds = ["sink"] * n
    masses: Dict[int, List[float]] = {}
    z = tg.points
    for p in range(n):
        if p in tg.sinks:
            continue
        if p in tg.degenerate:
            record = tg.degenerate[p]
            if not record.targets:
                raise WalkError("no_owner", f"collapsed face {record.label} has no incident segment")
            tq = np.array(record.targets, dtype=int)
            m = np.array(record.masses)
            targets[p] = tq
            rates[p] = m / np.abs(z[tq] - z[p]) ** 2
            kinds[p] = "degenerate"
            masses[p] = list(record.masses)
            continue
        seg = tg.segments[tg.owner[p]]
        others = [q for k, q in enumerate(seg.points) if k != seg.middle]
        q_minus, q_plus = segment_rates(z[p], z[others[0]], z[others[1]])
        targets[p] = np.array(others, dtype=int)
        rates[p] = np.array([q_minus, q_plus])
        kinds[p] = "segment"
    absorbing = np.array([k == "sink" for k in kinds])
    chain = Chain(z.copy(), targets, rates, absorbing)
    wr = WalkRates(chain, kinds, masses, tg.splitting.id)
    wr.tangent_report = check_tangent_rates(tg, wr)
    logger.info(f"Walk rates on {tg.te.name}: {kinds.count('segment')} segment points, "
                f"{kinds.count('degenerate')} degenerate, {kinds.count('sink')} sinks")
    return wr


def _neighbor_eta(tg: TGraph, seg, k: int) -> Optional[complex]:
    """η' of the open face across the side opposite the k-th vertex of a segment."""
    te = tg.te
    tri = seg.vertices
    u, v = tri[(k + 1) % 3], tri[(k + 2) % 3]
    sf = tg.splitting.faces.get(seg.parent)
    if sf is not None:
        for j, (a, c) in enumerate(sf.diagonals):
            if {u, v} == {a, c}:
                return tg.splitting.diagonal_eta(te, tg.eta, seg.parent, j)
    g = te.neighbor(u, v)
    if g is None:
        return None
    return complex(tg.eta.eta[g])


def check_tangent_rates(tg: TGraph, wr: WalkRates) -> DiagnosticsReport:
    """Compare geometric rates with (tan φ_{w_A} − tan φ_{w_C})/(8S) and (tan φ_{w_B} − tan φ_{w_A})/(8S).

    A is the middle vertex of a flattened triangle, B and C follow it
    counterclockwise and w_X is the open face across the side opposite X.
    """
    report = DiagnosticsReport(subject=f"tangent rates on {tg.te.name}")
    worst = 0.0
    checked = 0
    for p, s in tg.owner.items():
        if wr.kinds[p] != "segment":
            continue
        seg = tg.segments[s]
        a = seg.middle
        b, c = (a + 1) % 3, (a + 2) % 3
        etas = [_neighbor_eta(tg, seg, k) for k in range(3)]
        if any(e is None for e in etas):
            continue
        tan = [np.tan(np.angle(e ** 2) / 2) for e in etas]
        q_ab = (tan[a] - tan[c]) / (8 * seg.area)
        q_ac = (tan[b] - tan[a]) / (8 * seg.area)
        rates = dict(zip(wr.chain.targets[p].tolist(), wr.chain.rates[p].tolist()))
        for q_tan, k in ((q_ab, b), (q_ac, c)):
            q_geo = rates[seg.points[k]]
            r = abs(q_tan - q_geo) / q_geo
            worst = max(worst, r)
            if r > RATE_TOL:
                report.add("tangent_rate", tg.te.vertex_ids[seg.vertices[a]],
                           f"tangent rate {q_tan:.6e} vs geometric {q_geo:.6e}", value=float(r))
        checked += 1
    report.metrics["max_relative_error"] = worst
    report.metrics["n_checked"] = float(checked)
    return report


@dataclass
class InvariantMeasure:
    """μ per point with balance residuals."""
    mu: np.ndarray
    residuals: np.ndarray  # (inflow − outflow) per point, NaN at sinks
    deep: np.ndarray  # bool, T-graph distance ≥ DEEP_DISTANCE from every sink
    max_deep_residual: float
    subinvariant: bool

    def to_dict(self) -> dict:
        return {
            "mu": [float(m) for m in self.mu],
            "max_deep_residual": self.max_deep_residual,
            "subinvariant": self.subinvariant,
        }


def area_measure(tg: TGraph) -> np.ndarray:
    """μ(v) = S of the owning triangle; a collapsed point collects all triangles touching it twice."""
    mu = np.zeros(tg.n_points)
    for seg in tg.segments:
        pts = seg.points
        if seg.middle is not None:
            mu[pts[seg.middle]] += seg.area
            continue
        distinct = set(pts)
        if len(distinct) == 1:
            mu[pts[0]] += seg.area
        else:
            doubled = [p for p in distinct if pts.count(p) > 1][0]
            mu[doubled] += seg.area
    return mu


def _sink_distance(tg: TGraph, chain: Chain) -> np.ndarray:
    g = nx.Graph()
    g.add_nodes_from(range(chain.n_states))
    for s in range(chain.n_states):
        for t in chain.targets[s]:
            g.add_edge(s, int(t))
    g.add_node("sinks")
    for s in tg.sinks:
        g.add_edge("sinks", s)
    dist = nx.single_source_shortest_path_length(g, "sinks")
    return np.array([dist.get(s, np.inf) - 1 for s in range(chain.n_states)], dtype=float)


def invariant_measure(tg: TGraph, wr: WalkRates) -> InvariantMeasure:
    """Area measure μ with its stationarity residuals.

    Balance is exact away from the boundary; near sinks the measure is only
    subinvariant (inflow ≤ outflow).
    """
    mu = area_measure(tg)
    chain = wr.chain
    inflow = np.zeros(chain.n_states)
    outflow = np.zeros(chain.n_states)
    for s in range(chain.n_states):
        if chain.absorbing[s]:
            continue
        for t, q in zip(chain.targets[s], chain.rates[s]):
            inflow[int(t)] += mu[s] * q
            outflow[s] += mu[s] * q
    residuals = np.where(chain.absorbing, np.nan, inflow - outflow)
    dist = _sink_distance(tg, chain)
    deep = (dist >= DEEP_DISTANCE) & ~chain.absorbing
    scale = max(float(np.max(outflow)) if len(outflow) else 0.0, 1e-300)
    max_deep = float(np.max(np.abs(residuals[deep]))) / scale if np.any(deep) else 0.0
    interior = ~chain.absorbing
    subinvariant = bool(np.all(residuals[interior] <= STATIONARITY_TOL * scale))
    if max_deep > STATIONARITY_TOL:
        logger.warning(f"Area measure is not stationary on {tg.te.name}: residual {max_deep:.3e}")
    return InvariantMeasure(mu, residuals, deep, max_deep, subinvariant)
