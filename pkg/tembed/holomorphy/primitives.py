"""Primitives of t-holomorphic functions and the product-form integral."""
import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from tembed.core.errors import HolomorphyError
from tembed.core.models import Color
from tembed.embedding.origami import origami_increment
from tembed.embedding.tembedding import TEmbedding
from tembed.holomorphy.functions import THoloFunction, contour_sum

logger = logging.getLogger(__name__)


@dataclass
class Primitive:
    """Values of I_ℂ[F] (or its projection I_{αℝ}[F]) on the vertices of T."""
    values: np.ndarray  # NaN outside the integrated region
    basepoint: int
    alpha: Optional[complex] = None  # None for the full complex primitive
    monodromy: Dict[int, complex] = field(default_factory=dict)
    max_face_closure: float = 0.0

    def to_dict(self, te: TEmbedding) -> dict:
        return {
            "basepoint": te.vertex_ids[self.basepoint],
            "alpha": None if self.alpha is None else [self.alpha.real, self.alpha.imag],
            "monodromy": {te.faces[f].id: [z.real, z.imag] for f, z in self.monodromy.items()},
            "max_face_closure": self.max_face_closure,
            "values": {
                vid: [float(z.real), float(z.imag)]
                for vid, z in zip(te.vertex_ids, self.values) if not np.isnan(z)
            },
        }


def side_increment(te: TEmbedding, F: THoloFunction, u: int, v: int) -> complex:
    """dI_ℂ[F] along the edge u -> v of T.

    On edges next to a projection face the form is 2F^•dT; on a boundary edge
    of a primary face it is F dT + conj(F)·conj(dO) (t-white) or F dT + conj(F)·dO
    (t-black), with F the value of the sub-face containing the edge.
    """
    dT = te.positions[v] - te.positions[u]
    for f in (te.half_edges.get((u, v)), te.half_edges.get((v, u))):
        if f is not None and te.faces[f].color is F.projection_color and not np.isnan(F.coeffs[f]):
            return complex(2 * F.coeffs[f] * F.eta.eta[f] * dT)
    sign = 1
    f = te.half_edges.get((u, v))
    if f is None or te.faces[f].color is not F.kind:
        f = te.half_edges.get((v, u))
        u, v, dT, sign = v, u, -dT, -1
    if f is None or te.faces[f].color is not F.kind:
        return complex(np.nan, np.nan)
    z = F.value_on_side(te, f, u, v)
    dO = origami_increment(te, F.eta, f, u, v)
    second = np.conj(z) * (np.conj(dO) if F.kind is Color.WHITE else dO)
    return complex(sign * (z * dT + second))


def primitive(te: TEmbedding, F: THoloFunction, basepoint: int = 0, alpha: Optional[complex] = None,
              region: Optional[Iterable[int]] = None) -> Primitive:
    """Integrate F from a basepoint along a BFS tree of the edges of T.

    Args:
        te: The t-embedding
        F: t-holomorphic function
        basepoint: Vertex where the primitive vanishes
        alpha: Project the result onto αℝ when given
        region: Vertices to integrate over (default: all)

    Returns:
        Primitive with the monodromy 2∮F^•dT of every puncture and the
        largest face closure error away from punctures

    Raises:
        HolomorphyError: if the region is not connected to the basepoint
    """
    allowed = set(region) if region is not None else set(range(te.n_vertices))
    if basepoint not in allowed:
        raise HolomorphyError("disconnected", "basepoint lies outside the region", te.vertex_ids[basepoint])

    steps: Dict[int, List[Tuple[int, complex]]] = {v: [] for v in allowed}
    seen_edges = set()
    for (u, v) in te.half_edges:
        key = (min(u, v), max(u, v))
        if key in seen_edges or u not in allowed or v not in allowed:
            continue
        seen_edges.add(key)
        d = side_increment(te, F, u, v)
        if np.isnan(d):
            continue
        steps[u].append((v, d))
        steps[v].append((u, -d))

    values = np.full(te.n_vertices, np.nan + 0j, dtype=complex)
    values[basepoint] = 0.0
    queue = deque([basepoint])
    while queue:
        u = queue.popleft()
        for v, d in steps[u]:
            if np.isnan(values[v]):
                values[v] = values[u] + d
                queue.append(v)
    # vertices without a finite increment (undetermined boundary values) stay NaN
    unreached = [v for v in sorted(allowed) if np.isnan(values[v]) and steps[v]]
    undetermined = sum(1 for v in allowed if not steps[v])
    if undetermined:
        logger.debug(f"Primitive on {te.name}: {undetermined} vertices have no determined increment")
    if unreached:
        raise HolomorphyError("disconnected", f"{len(unreached)} vertices are not connected to the basepoint",
                              te.vertex_ids[unreached[0]])

    monodromy = {f: 2 * contour_sum(te, F, f)[0] for f in sorted(F.punctures)}
    worst = 0.0
    for f in range(len(te.faces)):
        if f in F.punctures or te.faces[f].color is not F.kind:
            continue
        cycle = te.faces[f].cycle
        if not all(v in allowed for v in cycle):
            continue
        incs = [side_increment(te, F, u, v) for u, v in te.faces[f].sides()]
        if any(np.isnan(d) for d in incs):
            continue
        scale = sum(abs(d) for d in incs)
        if scale > 0:
            worst = max(worst, abs(sum(incs)) / scale)

    if alpha is not None:
        alpha = complex(alpha) / abs(alpha)
        values = alpha * np.real(np.conj(alpha) * values)
        monodromy = {f: complex(alpha * np.real(np.conj(alpha) * z)) for f, z in monodromy.items()}
    logger.debug(f"Primitive on {te.name} from {te.vertex_ids[basepoint]}: face closure {worst:.2e}")
    return Primitive(values, basepoint, alpha, monodromy, worst)


def path_integral(te: TEmbedding, F: THoloFunction, path: Sequence[int]) -> complex:
    """∫ dI_ℂ[F] along a path of consecutive vertices of T."""
    total = 0.0 + 0.0j
    for u, v in zip(path, path[1:]):
        if (u, v) not in te.half_edges and (v, u) not in te.half_edges:
            raise HolomorphyError("bad_path", f"{te.vertex_ids[u]}-{te.vertex_ids[v]} is not an edge of T")
        total += side_increment(te, F, u, v)
    return complex(total)


@dataclass
class ProductFormResult:
    """∮F_w^•F_b° dT and the equivalent form ½Re(F_w°F_b^•dT + F_w°conj(F_b^•)dO)."""
    lhs: complex
    rhs: complex
    max_edge_mismatch: float

    def to_dict(self) -> dict:
        return {"lhs": [self.lhs.real, self.lhs.imag], "rhs": [self.rhs.real, self.rhs.imag],
                "max_edge_mismatch": self.max_edge_mismatch}


def product_form_integral(te: TEmbedding, Fw: THoloFunction, Fb: THoloFunction,
                          loop: Sequence[int]) -> ProductFormResult:
    """Integrate the product form of a t-white and a t-black function around a loop of T.

    Args:
        te: The t-embedding
        Fw: t-white-holomorphic function
        Fb: t-black-holomorphic function
        loop: Closed vertex path (the last vertex may repeat the first)

    Raises:
        HolomorphyError: if the loop touches a puncture, or a boundary edge when
            either function lacks standard boundary conditions
    """
    if Fw.kind is not Color.WHITE or Fb.kind is not Color.BLACK:
        raise HolomorphyError("bad_kind", "expected a t-white and a t-black holomorphic function")
    path = list(loop)
    if path[0] != path[-1]:
        path.append(path[0])
    bad = Fw.punctures | Fb.punctures
    lhs = 0.0 + 0.0j
    rhs = 0.0 + 0.0j
    worst = 0.0
    for u, v in zip(path, path[1:]):
        faces = [f for f in (te.half_edges.get((u, v)), te.half_edges.get((v, u))) if f is not None]
        if not faces:
            raise HolomorphyError("bad_path", f"{te.vertex_ids[u]}-{te.vertex_ids[v]} is not an edge of T")
        if bad & set(faces):
            raise HolomorphyError("puncture", "loop touches a puncture", te.vertex_ids[u])
        if len(faces) == 1:
            if Fw.boundary != "standard" or Fb.boundary != "standard":
                raise HolomorphyError("boundary", "loop runs along the boundary", te.vertex_ids[u])
            continue
        b, w = faces if te.faces[faces[0]].color is Color.BLACK else faces[::-1]
        dT = te.positions[v] - te.positions[u]
        edge_l = Fw.projected(b) * Fb.projected(w) * dT
        x = Fw.value_on_side(te, w, *_side_in(te, w, u, v))
        y = Fb.value_on_side(te, b, *_side_in(te, b, u, v))
        dO = Fw.eta.eta2[w] * dT
        edge_r = 0.5 * np.real(x * y * dT + x * np.conj(y) * dO)
        lhs += edge_l
        rhs += edge_r
        worst = max(worst, abs(edge_l - edge_r))
    return ProductFormResult(complex(lhs), complex(rhs), worst)


def _side_in(te: TEmbedding, f: int, u: int, v: int) -> Tuple[int, int]:
    return (u, v) if te.half_edges.get((u, v)) == f else (v, u)
