"""Triangular t-embeddings of the honeycomb dimer graph.

Vertices of T are the lattice points i + jω, ω = e^{iπ/3}. The up
triangle (a, a+1, a+ω) is black and the down triangle (a+1, a+1+ω, a+ω)
is white; both lists are counterclockwise. The canonical η is a cube
root of unity on every face with all edge signs equal to −1.
"""
import logging
from dataclasses import dataclass
from typing import Callable, List, Tuple

import numpy as np

from tembed.core.models import Color, Mode
from tembed.embedding.tembedding import TEmbedding, TFace
from tembed.lattices.base import LatticeBuilder, LatticeBundle
from tembed.lattices.square import GridData

logger = logging.getLogger(__name__)

OMEGA = np.exp(1j * np.pi / 3)
CUBE_ROOT = np.exp(2j * np.pi / 3)


def triangular_tembedding(size: int, place: Callable[[int, int], complex], name: str,
                          mode: Mode = Mode.FINITE, meta: dict = None) -> Tuple[TEmbedding, GridData, GridData]:
    """Up/down triangles over a size × size parallelogram of lattice points.

    Returns:
        (t-embedding, vertex/black-face grid, white-face grid)
    """
    blacks = GridData()
    whites = GridData()
    positions: List[complex] = []
    ids: List[str] = []
    for j in range(size + 1):
        for i in range(size + 1):
            blacks.vertex[(i, j)] = len(positions)
            positions.append(place(i, j))
            ids.append(f"t{i}_{j}")
    v = blacks.vertex
    faces: List[TFace] = []
    for j in range(size):
        for i in range(size):
            blacks.face[(i, j)] = len(faces)
            blacks.coords[len(faces)] = (i, j)
            faces.append(TFace(f"b{i}_{j}", Color.BLACK, (v[(i, j)], v[(i + 1, j)], v[(i, j + 1)])))
            whites.face[(i, j)] = len(faces)
            whites.coords[len(faces)] = (i, j)
            faces.append(TFace(f"w{i}_{j}", Color.WHITE, (v[(i + 1, j)], v[(i + 1, j + 1)], v[(i, j + 1)])))
    whites.vertex = blacks.vertex
    te = TEmbedding(positions, faces, ids, mode, name, dict(meta or {}))
    return te, blacks, whites


class HoneycombLattice(LatticeBuilder):
    """Equilateral triangles: the critical t-embedding of the honeycomb."""

    @property
    def kind(self) -> str:
        return "honeycomb"

    def tembedding(self) -> TEmbedding:
        delta = self.delta
        te, self.blacks, self.whites = triangular_tembedding(
            self.size, lambda i, j: delta * (i + j * OMEGA), f"honeycomb-{self.size}", self.mode,
            {"lattice": "honeycomb", "delta": delta},
        )
        return te

    def canonical_eta(self, te: TEmbedding) -> np.ndarray:
        eta = np.empty(len(te.faces), dtype=complex)
        for (i, j), f in self.blacks.face.items():
            eta[f] = CUBE_ROOT ** ((2 * i + j) % 3)
        for (i, j), f in self.whites.face.items():
            eta[f] = CUBE_ROOT ** (-((2 * i + j + 1) % 3))
        return eta

    def decorate(self, bundle: LatticeBundle) -> None:
        bundle.data = HoneycombData(self.blacks, self.whites)


@dataclass
class HoneycombData:
    """Grid maps of the black (up) and white (down) triangles."""
    blacks: GridData
    whites: GridData

    def to_dict(self) -> dict:
        return {"n_black": len(self.blacks.face), "n_white": len(self.whites.face)}
