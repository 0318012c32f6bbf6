"""Base lattice builder interface for tembed.

Defines the abstract interface every lattice construction implements and
the bundle it returns: a validated t-embedding with its origami square
root function, origami map and the framework data of the construction.
"""
import logging
from abc import ABC, abstractmethod
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np

from tembed.core.errors import LatticeError
from tembed.core.models import DiagnosticsReport, Mode
from tembed.embedding.origami import OrigamiField, OrigamiMap, compute_eta, compute_origami, origami_field
from tembed.embedding.tembedding import TEmbedding, validate_tembedding

logger = logging.getLogger(__name__)


@dataclass
class LatticeBundle:
    """A constructed lattice with everything downstream modules need."""
    kind: str  # "square", "honeycomb", "isoradial-rhombic", ...
    te: TEmbedding
    eta: OrigamiField
    om: OrigamiMap
    delta: float
    report: DiagnosticsReport
    framework: str = "t-embedding"  # "orthodiagonal", "s-embedding", ...
    q: Optional[np.ndarray] = None  # 𝒬 per vertex of T, NaN off Λ
    data: Any = None  # framework data (grid indices, OrthodiagonalData, SEmbeddingData)
    meta: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "kind": self.kind,
            "framework": self.framework,
            "delta": self.delta,
            "n_vertices": self.te.n_vertices,
            "n_faces": len(self.te.faces),
            "mesh_size": self.te.mesh_size,
            "validation": self.report.to_dict(),
            "meta": dict(self.meta),
        }
        if self.q is not None:
            out["q"] = {vid: float(x) for vid, x in zip(self.te.vertex_ids, self.q) if not np.isnan(x)}
        if self.data is not None and hasattr(self.data, "to_dict"):
            out["data"] = self.data.to_dict()
        return out


def complete_eta(te: TEmbedding, eta: np.ndarray) -> np.ndarray:
    """Fill NaN entries of η from assigned neighbors along η̄_bη̄_w = dT/|dT|."""
    eta = np.array(eta, dtype=complex)
    adjacency: Dict[int, list] = {i: [] for i in range(len(te.faces))}
    for e in te.g_edges:
        d = te.dT(e) / abs(te.dT(e))
        adjacency[e.b].append((e.w, d))
        adjacency[e.w].append((e.b, d))
    queue = deque(int(f) for f in np.flatnonzero(~np.isnan(eta)))
    while queue:
        f = queue.popleft()
        for g, d in adjacency[f]:
            if np.isnan(eta[g]):
                eta[g] = np.conj(d * eta[f])
                queue.append(g)
    if np.any(np.isnan(eta)):
        raise LatticeError("disconnected", f"eta could not be propagated to every face of {te.name}")
    return eta


class LatticeBuilder(ABC):
    """Abstract base class for lattice constructions.

    Subclasses produce the t-embedding and may install a canonical η and
    attach framework data; validation, η and the origami map are shared.
    """

    strict = True  # raise on validation errors instead of recording them

    def __init__(self, size: int, delta: float = 1.0, mode: Mode = Mode.FINITE):
        if size < 2:
            raise LatticeError("bad_size", f"lattice size must be at least 2, got {size}", value=float(size))
        if delta <= 0:
            raise LatticeError("bad_delta", f"mesh size delta must be positive, got {delta}", value=float(delta))
        self.size = int(size)
        self.delta = float(delta)
        self.mode = mode

    @property
    @abstractmethod
    def kind(self) -> str:
        """Return the lattice kind identifier."""
        pass

    @property
    def framework(self) -> str:
        return "t-embedding"

    @abstractmethod
    def tembedding(self) -> TEmbedding:
        """Construct the t-embedding.

        Returns:
            TEmbedding with counterclockwise faces
        """
        pass

    def canonical_eta(self, te: TEmbedding) -> Optional[np.ndarray]:
        """Return a canonical η per face, or None to use compute_eta.

        Override in subclasses whose framework fixes the signs of η.
        """
        return None

    def origami_base(self, te: TEmbedding) -> int:
        return min(te.boundary_vertices) if te.boundary_vertices else 0

    def decorate(self, bundle: LatticeBundle) -> None:
        """Attach framework data to a finished bundle."""
        return None

    def build(self) -> LatticeBundle:
        """Build, validate and equip the lattice.

        Raises:
            LatticeError: if the constructed t-embedding fails validation
        """
        te = self.tembedding()
        report = validate_tembedding(te, self.mode)
        if not report.ok and self.strict:
            first = report.errors[0]
            raise LatticeError("invalid_lattice", f"{self.kind} lattice failed validation: {first.message}",
                               first.location, first.value)
        values = self.canonical_eta(te)
        if values is None:
            eta = compute_eta(te)
        else:
            eta = origami_field(te, values, te.white[0] if te.white else 0)
        om = compute_origami(te, eta, base=self.origami_base(te))
        bundle = LatticeBundle(self.kind, te, eta, om, self.delta, report, self.framework,
                               meta={"size": self.size, "mode": self.mode.value, "embedded": report.ok})
        self.decorate(bundle)
        logger.info(f"Built {self.kind} lattice {te.name}: {te.n_vertices} vertices, {len(te.faces)} faces, "
                    f"mesh {te.mesh_size:.4g}")
        return bundle
