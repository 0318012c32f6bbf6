"""Circle-pattern realisation of a t-embedding.

Points C(b), C(w) of adjacent faces are mirror images across the line
through the common edge. Propagating from one white face by reflections
closes up around every interior vertex exactly when the angle condition
holds.
"""
import logging
from collections import deque
from dataclasses import dataclass
from typing import Dict

import numpy as np

from tembed.core.errors import EmbeddingError
from tembed.embedding.tembedding import TEmbedding

logger = logging.getLogger(__name__)

CLOSURE_TOL = 1e-10  # relative to the embedding diameter


def reflect(z: complex, p: complex, q: complex) -> complex:
    """Mirror image of z across the line through p and q."""
    d = (q - p) / abs(q - p)
    return p + d * d * np.conj(z - p)


@dataclass
class CirclePattern:
    """Realisation C of V(G), one point per face of T."""
    points: np.ndarray
    w0: int
    z0: complex
    max_residual: float

    def at(self, te: TEmbedding, face_id: str) -> complex:
        return complex(self.points[te.face_index[face_id]])

    def to_dict(self, te: TEmbedding) -> dict:
        return {
            "w0": te.faces[self.w0].id,
            "z0": [float(np.real(self.z0)), float(np.imag(self.z0))],
            "max_residual": self.max_residual,
            "points": {f.id: [float(z.real), float(z.imag)] for f, z in zip(te.faces, self.points)},
        }


def circle_pattern(te: TEmbedding, w0: int, z0: complex) -> CirclePattern:
    """Propagate C from C(w0) = z0 by reflections across the edges of T.

    Raises:
        EmbeddingError: if the reflections do not close up around some vertex
    """
    if w0 in te.boundary_faces and te.interior_vertices:
        logger.warning(f"circle pattern seeded at boundary face {te.faces[w0].id}")
    n = len(te.faces)
    points = np.full(n, np.nan + 0j, dtype=complex)
    points[w0] = z0
    queue = deque([w0])
    while queue:
        f = queue.popleft()
        for u, v in te.faces[f].sides():
            g = te.neighbor(u, v)
            if g is None or not np.isnan(points[g]):
                continue
            points[g] = reflect(points[f], te.positions[u], te.positions[v])
            queue.append(g)

    if np.any(np.isnan(points)):
        raise EmbeddingError("disconnected", "faces unreachable from the seed face", te.faces[w0].id)

    scale = max(te.diameter, abs(z0), 1.0)
    worst = 0.0
    where = None
    for (u, v), f in te.half_edges.items():
        g = te.neighbor(u, v)
        if g is None:
            continue
        r = abs(reflect(points[f], te.positions[u], te.positions[v]) - points[g])
        if r > worst:
            worst, where = r, te.vertex_ids[u]
    if worst > CLOSURE_TOL * scale:
        raise EmbeddingError("circle_closure", f"reflection closure residual {worst:.3e}", where, worst)
    logger.info(f"Circle pattern on {te.name}: closure residual {worst:.3e}")
    return CirclePattern(points, w0, complex(z0), worst)


def closure_residuals(te: TEmbedding, cp: CirclePattern) -> Dict[int, float]:
    """Per-vertex residual of composing the reflections around it."""
    out = {}
    for v in te.interior_vertices:
        star, closed = te.vertex_star(v)
        if not closed:
            continue
        z = cp.points[star[0]]
        for j in range(len(star)):
            f = star[j]
            # the next face is across the side (v, prev_f(v))
            z = reflect(z, te.positions[v], te.positions[te.faces[f].prev_of(v)])
        out[v] = float(abs(z - cp.points[star[0]]))
    return out
