"""Time reversal of the T-graph walk on a white-flat T-graph.

Around an interior vertex v of T, each white (sub-)face w_k of the split star
sits between black entries b_{k−1} and b_k and carries the increment
c_k = tan φ'_{b_{k−1}} − tan φ'_{b_k}, where φ'_b = arg(ᾱη_b) mod π. These
increments telescope to zero and exactly one of them is negative; its face
is w(v), the face whose segment contains v in its interior. The reversed
walk jumps from v to w⁻¹(w_k) with rate c_k/(8S_{w(v)}).
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from tembed.core.errors import WalkError
from tembed.core.models import Color, DiagnosticsReport, Flavor
from tembed.embedding.splitting import triangle_area
from tembed.holomorphy.functions import THoloFunction
from tembed.walks.rates import Chain
from tembed.walks.tgraph import TGraph

logger = logging.getLogger(__name__)

TAN_LIMIT = 1e12
IDENTITY_TOL = 1e-9
SINK = -1

WhiteKey = Tuple[int, Optional[int]]  # (white face, sub-triangle index or None)


@dataclass
class VertexIncrements:
    """Increments c_k around one vertex."""
    vertex: int
    whites: List[WhiteKey]
    c: np.ndarray
    owner: Optional[WhiteKey] = None


@dataclass
class BackwardStructure:
    """Correspondence v ↦ w(v) and backward transition data."""
    tg: TGraph
    increments: Dict[int, VertexIncrements]
    owner_of: Dict[int, WhiteKey]  # vertex -> w(v)
    vertex_of: Dict[WhiteKey, int]  # w -> w⁻¹(w)
    probabilities: Dict[int, Dict[int, float]]  # p̃(v -> u), SINK for faces without a vertex
    rates: Dict[int, Dict[int, float]]  # q̃(v -> u)
    skipped: List[int] = field(default_factory=list)
    geometric_mismatch: int = 0

    def chain(self) -> Chain:
        """The reversed walk as a chain on vertices of T plus one sink state."""
        verts = sorted(self.rates)
        index = {v: i for i, v in enumerate(verts)}
        sink = len(verts)
        z = self.tg.te.positions
        positions = np.array([z[v] for v in verts] + [np.nan], dtype=complex)
        targets, rates = [], []
        for v in verts:
            row = self.rates[v]
            targets.append(np.array([index.get(u, sink) for u in row], dtype=int))
            rates.append(np.array(list(row.values())))
        targets.append(np.empty(0, dtype=int))
        rates.append(np.empty(0))
        absorbing = np.zeros(len(verts) + 1, dtype=bool)
        absorbing[sink] = True
        return Chain(positions, targets, rates, absorbing)

    def to_dict(self) -> dict:
        te = self.tg.te

        def key(w):
            return te.faces[w[0]].id if w[1] is None else f"{te.faces[w[0]].id}/t{w[1]}"

        return {
            "owners": {te.vertex_ids[v]: key(w) for v, w in sorted(self.owner_of.items())},
            "probabilities": {
                te.vertex_ids[v]: {("sink" if u == SINK else te.vertex_ids[u]): p for u, p in row.items()}
                for v, row in sorted(self.probabilities.items())
            },
            "skipped": [te.vertex_ids[v] for v in self.skipped],
            "geometric_mismatch": self.geometric_mismatch,
        }


def _tan(eta: complex) -> float:
    phi = np.angle(eta ** 2) / 2
    return float(np.tan(phi))


def star_increments(tg: TGraph, v: int) -> Optional[VertexIncrements]:
    """c_k for the white entries around v, or None when some tangent is infinite."""
    te = tg.te
    sp = tg.splitting
    entries, closed = sp.split_star(te, v)
    if not closed:
        return None
    n = len(entries)
    etas = []
    for e in entries:
        if e.kind == "diagonal":
            etas.append(sp.diagonal_eta(te, tg.eta, e.face, e.part))
        else:
            etas.append(complex(tg.eta.eta[e.face]))
    whites: List[WhiteKey] = []
    c = []
    for k, e in enumerate(entries):
        if e.color is not Color.WHITE:
            continue
        before, after = etas[(k - 1) % n], etas[(k + 1) % n]
        if abs(before.real) * TAN_LIMIT < abs(before.imag) or abs(after.real) * TAN_LIMIT < abs(after.imag):
            return None
        whites.append((e.face, e.part))
        c.append(_tan(before) - _tan(after))
    return VertexIncrements(v, whites, np.array(c))


def backward_structure(tg: TGraph) -> BackwardStructure:
    """Owners w(v), backward probabilities p̃ and rates q̃ on a white-flat T-graph.

    Boundary vertices and vertices with an infinite tangent are skipped.

    Raises:
        WalkError: if the T-graph is not white-flat or some vertex has no unique negative increment
    """
    if tg.flavor is not Flavor.WHITE_FLAT:
        raise WalkError("bad_flavor", "the backward walk lives on a white-flat T-graph")
    te = tg.te
    increments: Dict[int, VertexIncrements] = {}
    owner_of: Dict[int, WhiteKey] = {}
    skipped: List[int] = []
    for v in te.interior_vertices:
        inc = star_increments(tg, v)
        if inc is None:
            skipped.append(v)
            continue
        scale = max(float(np.max(np.abs(inc.c))), 1e-300)
        negative = [k for k, ck in enumerate(inc.c) if ck < -1e-12 * scale]
        if len(negative) != 1:
            raise WalkError("no_unique_owner",
                            f"{len(negative)} negative tangent increments around {te.vertex_ids[v]}",
                            te.vertex_ids[v])
        inc.owner = inc.whites[negative[0]]
        increments[v] = inc
        owner_of[v] = inc.owner
    vertex_of = {w: v for v, w in owner_of.items()}

    mismatch = 0
    for v, (f, part) in owner_of.items():
        p = int(tg.vertex_point[v])
        s = tg.owner.get(p)
        if s is None:
            continue
        seg = tg.segments[s]
        if seg.parent != f or seg.part != part or seg.vertices[seg.middle] != v:
            mismatch += 1
    if mismatch:
        logger.warning(f"{mismatch} backward owners differ from the T-graph segment owners on {te.name}")

    probabilities: Dict[int, Dict[int, float]] = {}
    rates: Dict[int, Dict[int, float]] = {}
    for v, inc in increments.items():
        k_own = inc.whites.index(inc.owner)
        f, part = inc.owner
        tri = tg.splitting.triangles(te, f)[part or 0]
        area = abs(triangle_area(te.positions[list(tri)]))
        prow: Dict[int, float] = {}
        qrow: Dict[int, float] = {}
        for k, w in enumerate(inc.whites):
            if k == k_own or inc.c[k] == 0:
                continue
            u = vertex_of.get(w, SINK)
            prow[u] = prow.get(u, 0.0) + float(inc.c[k] / -inc.c[k_own])
            qrow[u] = qrow.get(u, 0.0) + float(inc.c[k] / (8 * area))
        probabilities[v] = prow
        rates[v] = qrow
    logger.info(f"Backward structure on {te.name}: {len(owner_of)} vertices, {len(skipped)} skipped")
    return BackwardStructure(tg, increments, owner_of, vertex_of, probabilities, rates, skipped, mismatch)


def check_backward_identity(bs: BackwardStructure, F: THoloFunction) -> DiagnosticsReport:
    """Residual of Σ_k Im(ᾱF°(w_k)) c_k at every vertex whose star avoids punctures.

    F must be t-white-holomorphic with sub-triangle values for the same white splitting.
    """
    te = bs.tg.te
    alpha = bs.tg.alpha
    report = DiagnosticsReport(subject=f"backward identity on {te.name}")
    worst = 0.0
    for v, inc in bs.increments.items():
        faces = {w for w, _ in inc.whites}
        if faces & F.punctures:
            continue
        vals = []
        for f, part in inc.whites:
            if part is not None and f in F.sub_values:
                vals.append(F.sub_values[f][part])
            else:
                vals.append(F.values[f])
        vals = np.array(vals, dtype=complex)
        if np.any(np.isnan(vals)):
            continue
        terms = np.imag(np.conj(alpha) * vals) * inc.c
        scale = float(np.sum(np.abs(terms)))
        r = abs(float(np.sum(terms))) / scale if scale > 0 else 0.0
        worst = max(worst, r)
        if r > IDENTITY_TOL:
            report.add("backward_identity", te.vertex_ids[v], f"identity off by {r:.3e}", value=r)
    report.metrics["max_residual"] = worst
    return report
