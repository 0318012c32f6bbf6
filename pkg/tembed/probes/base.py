"""Result type shared by the regularity probes."""
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from tembed.walks.tgraph import TGraph

logger = logging.getLogger(__name__)

CONFIDENCE_SE = 3.0  # half-width of reported confidence intervals, in standard errors


@dataclass
class ProbeResult:
    """One Monte Carlo or exact estimate with its uncertainty.

    stderr is the sample standard deviation over √n for means and the
    binomial √(p(1 − p)/n) for probabilities; exact estimates carry 0.
    """
    name: str  # "variance", "trace", "tail", "isotropy", "crossing", "oscillation", "lipschitz"
    estimate: float
    stderr: float = 0.0
    n_samples: int = 0
    params: Dict[str, Any] = field(default_factory=dict)
    seed: Optional[int] = None
    flags: List[str] = field(default_factory=list)  # "below_scale", "absorbed", "bound_violated", ...
    table: List[Dict[str, float]] = field(default_factory=list)

    @property
    def interval(self) -> Tuple[float, float]:
        return self.estimate - CONFIDENCE_SE * self.stderr, self.estimate + CONFIDENCE_SE * self.stderr

    @property
    def in_regime(self) -> bool:
        return "below_scale" not in self.flags

    def to_dict(self) -> dict:
        lo, hi = self.interval
        return {
            "name": self.name,
            "estimate": None if np.isnan(self.estimate) else float(self.estimate),
            "stderr": float(self.stderr),
            "interval": [None if np.isnan(lo) else float(lo), None if np.isnan(hi) else float(hi)],
            "n_samples": self.n_samples,
            "params": dict(self.params),
            "seed": self.seed,
            "flags": list(self.flags),
            "table": list(self.table),
        }

    def to_row(self) -> Dict[str, Any]:
        """Flat CSV row."""
        row = {"name": self.name, "estimate": self.estimate, "stderr": self.stderr, "n_samples": self.n_samples,
               "seed": self.seed, "flags": ";".join(self.flags)}
        for k, v in self.params.items():
            if isinstance(v, (int, float, str)):
                row[k] = v
        return row


def proportion(hits: np.ndarray) -> Tuple[float, float]:
    """Sample frequency and its binomial standard error."""
    n = len(hits)
    if n == 0:
        return float("nan"), float("nan")
    p = float(np.mean(hits))
    return p, float(np.sqrt(p * (1 - p) / n))


def central_point(tg: TGraph, wr) -> int:
    """The non-absorbing point closest to the mean position of all non-absorbing points."""
    live = np.flatnonzero(~wr.chain.absorbing)
    pts = tg.points[live]
    return int(live[np.argmin(np.abs(pts - pts.mean()))])
