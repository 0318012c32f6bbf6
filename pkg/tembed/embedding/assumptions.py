"""Empirical checks of the Lipschitz and fat-face assumptions on O."""
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional

import networkx as nx
import numpy as np

from tembed.core.models import Color
from tembed.embedding.origami import OrigamiMap
from tembed.embedding.splitting import Splitting, inradius
from tembed.embedding.tembedding import TEmbedding

logger = logging.getLogger(__name__)

MAX_EXHAUSTIVE_PAIRS = 1_000_000
DEFAULT_SAMPLE_PAIRS = 200_000


@dataclass
class FatnessLevel:
    """Non-fat faces at one β, grouped into vertex-connected components."""
    beta: float
    rho: float
    n_nonfat: int
    components: List[List[str]]
    max_component_diameter: float

    def to_dict(self) -> dict:
        return {
            "beta": self.beta,
            "rho": self.rho,
            "n_nonfat": self.n_nonfat,
            "n_components": len(self.components),
            "max_component_diameter": self.max_component_diameter,
        }


@dataclass
class AssumptionReport:
    """κ_min(r) per scale and fat-face statistics per β."""
    delta: float
    kappa: Dict[float, float] = field(default_factory=dict)
    fatness: List[FatnessLevel] = field(default_factory=list)
    n_pairs: int = 0
    exhaustive: bool = True
    seed: Optional[int] = None

    def to_dict(self) -> dict:
        return {
            "delta": self.delta,
            "kappa": {str(r): k for r, k in self.kappa.items()},
            "fatness": [lvl.to_dict() for lvl in self.fatness],
            "n_pairs": self.n_pairs,
            "exhaustive": self.exhaustive,
            "seed": self.seed,
        }


def face_inradius(te: TEmbedding, face: int, splitting: Optional[Splitting] = None) -> float:
    """Inradius for triangles; minimum over the sub-triangles of a split face otherwise."""
    if splitting is not None and splitting.color is te.faces[face].color:
        tris = splitting.triangles(te, face)
    else:
        cycle = te.faces[face].cycle
        tris = tuple((cycle[0], cycle[j], cycle[j + 1]) for j in range(1, len(cycle) - 1))
    return min(inradius(te.positions[list(t)]) for t in tris)


def _pairs(n: int, max_pairs: int, seed: int):
    total = n * (n - 1) // 2
    if total <= MAX_EXHAUSTIVE_PAIRS:
        i, j = np.triu_indices(n, k=1)
        return i, j, True
    rng = np.random.default_rng(seed)
    i = rng.integers(0, n, size=max_pairs)
    j = rng.integers(0, n, size=max_pairs)
    keep = i != j
    return i[keep], j[keep], False


def check_assumptions(te: TEmbedding, om: OrigamiMap, r_grid: Iterable[float],
                      beta_grid: Iterable[float] = (), region: Optional[List[int]] = None,
                      splittings: Optional[Dict[Color, Splitting]] = None,
                      seed: int = 0, max_pairs: int = DEFAULT_SAMPLE_PAIRS) -> AssumptionReport:
    """Measure κ_min(r) and the non-fat clusters of an embedding.

    Args:
        te: The t-embedding
        om: Its origami map
        r_grid: Scales r; κ_min(r) is the largest |ΔO|/|Δz| over pairs with |Δz| ≥ r
        beta_grid: Values β; faces containing a disc of radius exp(−β/δ) count as fat
        region: Vertex indices to restrict the Lipschitz check to (default: all)
        splittings: Splittings per color used for non-triangular faces
        seed: Seed for sampled pairs when exhaustive enumeration is too large
        max_pairs: Number of sampled pairs
    """
    delta = te.mesh_size
    verts = np.array(region if region is not None else range(te.n_vertices))
    z = te.positions[verts]
    o = om.values[verts]
    i, j, exhaustive = _pairs(len(verts), max_pairs, seed)
    dz = np.abs(z[i] - z[j])
    do = np.abs(o[i] - o[j])
    ratio = np.divide(do, dz, out=np.zeros_like(do), where=dz > 0)

    report = AssumptionReport(delta=delta, n_pairs=len(i), exhaustive=exhaustive,
                              seed=None if exhaustive else seed)
    for r in sorted(r_grid):
        mask = dz >= r
        report.kappa[float(r)] = float(ratio[mask].max()) if np.any(mask) else 0.0

    splittings = splittings or {}
    radii = np.array([
        face_inradius(te, f, splittings.get(te.faces[f].color)) for f in range(len(te.faces))
    ])
    for beta in beta_grid:
        rho = float(np.exp(-beta / delta)) if delta > 0 else 0.0
        nonfat = [f for f in range(len(te.faces)) if radii[f] < rho]
        g = nx.Graph()
        g.add_nodes_from(nonfat)
        by_vertex: Dict[int, List[int]] = {}
        for f in nonfat:
            for v in te.faces[f].cycle:
                by_vertex.setdefault(v, []).append(f)
        for faces in by_vertex.values():
            for a, b in zip(faces, faces[1:]):
                g.add_edge(a, b)
        components = []
        max_diam = 0.0
        for comp in nx.connected_components(g):
            pts = te.positions[sorted({v for f in comp for v in te.faces[f].cycle})]
            diam = float(np.max(np.abs(pts[:, None] - pts[None, :])))
            max_diam = max(max_diam, diam)
            components.append(sorted(te.faces[f].id for f in comp))
        components.sort()
        report.fatness.append(FatnessLevel(float(beta), rho, len(nonfat), components, max_diam))

    logger.info(
        f"Assumptions on {te.name}: delta={delta:.4g}, {report.n_pairs} pairs "
        f"({'exhaustive' if exhaustive else 'sampled'}), kappa={report.kappa}"
    )
    return report
