"""Fan splittings of high-degree faces.

A face of degree n > 3 is cut by diagonals from an anchor vertex a into
sub-triangles (a, c_j, c_j+1). Each diagonal becomes a 2-gon of the
opposite color whose η is determined by the parent face and the diagonal
direction.
"""
import hashlib
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from tembed.core.models import Color
from tembed.embedding.origami import OrigamiField
from tembed.embedding.tembedding import TEmbedding

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SplitFace:
    """Fan triangulation of one face."""
    parent: int
    anchor: int
    triangles: Tuple[Tuple[int, int, int], ...]  # ccw (a, c_j, c_j+1)
    diagonals: Tuple[Tuple[int, int], ...]  # (a, c_j+1) between triangles j and j+1


@dataclass(frozen=True)
class StarEntry:
    """One sector of the split star around a vertex."""
    kind: str  # "face", "triangle", "diagonal"
    color: Color
    face: int
    part: Optional[int] = None  # triangle or diagonal index inside a split face


@dataclass
class Splitting:
    """Splitting of all faces of one color."""
    color: Color
    faces: Dict[int, SplitFace] = field(default_factory=dict)
    id: str = "none"

    def is_split(self, face: int) -> bool:
        return face in self.faces

    def triangles(self, te: TEmbedding, face: int) -> Tuple[Tuple[int, int, int], ...]:
        if face in self.faces:
            return self.faces[face].triangles
        return (tuple(te.faces[face].cycle),)

    def diagonal_eta(self, te: TEmbedding, eta: OrigamiField, face: int, j: int) -> complex:
        """η of the 2-gon along diagonal j of a split face."""
        a, c = self.faces[face].diagonals[j]
        u = te.positions[c] - te.positions[a]
        u = u / abs(u)
        return complex(np.conj(u * eta.eta[face]))

    def split_star(self, te: TEmbedding, v: int) -> Tuple[List[StarEntry], bool]:
        """Sectors around v in counterclockwise order after splitting."""
        star, closed = te.vertex_star(v)
        out: List[StarEntry] = []
        for f in star:
            color = te.faces[f].color
            sf = self.faces.get(f)
            if sf is None:
                out.append(StarEntry("face", color, f))
                continue
            tris = sf.triangles
            if v == sf.anchor:
                for j in range(len(tris)):
                    if j > 0:
                        out.append(StarEntry("diagonal", color.other, f, j - 1))
                    out.append(StarEntry("triangle", color, f, j))
                continue
            # non-anchor vertex c_j sits in triangles j-1 and j (1-based c index)
            inside = [j for j, t in enumerate(tris) if v in t]
            if len(inside) == 1:
                out.append(StarEntry("triangle", color, f, inside[0]))
            else:
                lo, hi = sorted(inside)
                out.append(StarEntry("triangle", color, f, hi))
                out.append(StarEntry("diagonal", color.other, f, lo))
                out.append(StarEntry("triangle", color, f, lo))
        return out, closed

    def to_dict(self, te: TEmbedding) -> dict:
        return {
            "id": self.id,
            "color": self.color.value,
            "anchors": {te.faces[f].id: te.vertex_ids[sf.anchor] for f, sf in sorted(self.faces.items())},
        }


def default_anchor(te: TEmbedding, face: int) -> int:
    """Lowest-index boundary vertex if the face touches the boundary, else the lowest-index vertex."""
    cycle = te.faces[face].cycle
    on_boundary = [v for v in cycle if v in te.boundary_vertices]
    return min(on_boundary) if on_boundary else min(cycle)


def build_splitting(te: TEmbedding, color: Color, anchors: Optional[Dict[int, int]] = None) -> Splitting:
    """Fan-split every face of the given color with degree > 3.

    Args:
        te: The t-embedding
        color: Color of the faces to split
        anchors: Optional anchor vertex per face index, overriding the default rule
    """
    anchors = anchors or {}
    faces: Dict[int, SplitFace] = {}
    for f in te.faces_of(color):
        cycle = te.faces[f].cycle
        if len(cycle) <= 3:
            continue
        a = anchors.get(f, default_anchor(te, f))
        i = cycle.index(a)
        c = cycle[i:] + cycle[:i]
        n = len(c)
        triangles = tuple((a, c[j], c[j + 1]) for j in range(1, n - 1))
        diagonals = tuple((a, c[j + 1]) for j in range(1, n - 2))
        faces[f] = SplitFace(f, a, triangles, diagonals)

    digest = hashlib.sha256(
        ",".join(f"{f}:{sf.anchor}" for f, sf in sorted(faces.items())).encode()
    ).hexdigest()[:8]
    splitting = Splitting(color, faces, f"fan-{color.value}-{digest}")
    logger.debug(f"Splitting {splitting.id}: {len(faces)} {color.value} faces split")
    return splitting


def triangle_area(z: np.ndarray) -> float:
    return 0.5 * float(((np.conj(z[1] - z[0])) * (z[2] - z[0])).imag)


def inradius(z: np.ndarray) -> float:
    """Inradius 2S/perimeter of a triangle."""
    perimeter = float(np.sum(np.abs(np.roll(z, -1) - z)))
    if perimeter == 0:
        return 0.0
    return 2 * abs(triangle_area(z)) / perimeter
