"""Square-grid checkerboard t-embedding.

Squares of side δ centered at δ(p + iq), black when p + q is even. Black
squares split into B_R (p, q even) and B_I (p, q odd); white squares into
W_λ (p even) and W_iλ (p odd). The canonical η is 1 on B_R and i on B_I,
so every black square folds onto one square under O.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np

from tembed.core.models import Color, Mode
from tembed.embedding.splitting import Splitting, build_splitting
from tembed.embedding.tembedding import TEmbedding, TFace
from tembed.lattices.base import LatticeBuilder, LatticeBundle, complete_eta

logger = logging.getLogger(__name__)

LAMBDA = np.exp(1j * np.pi / 4)


@dataclass
class GridData:
    """Index maps from lattice coordinates to vertices and faces of T."""
    vertex: Dict[Tuple[int, int], int] = field(default_factory=dict)
    face: Dict[Tuple[int, int], int] = field(default_factory=dict)
    coords: Dict[int, Tuple[int, int]] = field(default_factory=dict)  # face index -> (p, q)

    def to_dict(self) -> dict:
        return {"n_vertices": len(self.vertex), "n_faces": len(self.face)}


def square_class(p: int, q: int) -> str:
    """B_R, B_I, W_λ or W_iλ."""
    if (p + q) % 2 == 0:
        return "B_R" if p % 2 == 0 else "B_I"
    return "W_lambda" if p % 2 == 0 else "W_ilambda"


def square_line(p: int, q: int) -> complex:
    """Direction η(s) of the s-holomorphicity condition on square (p, q)."""
    return {"B_R": 1.0 + 0j, "B_I": 1j, "W_lambda": LAMBDA, "W_ilambda": 1j * LAMBDA}[square_class(p, q)]


def square_tembedding(size: int, delta: float = 1.0, name: str = "square",
                      mode: Mode = Mode.FINITE) -> Tuple[TEmbedding, GridData]:
    """size × size squares; vertex (i, j) sits at δ(i − ½ + i(j − ½))."""
    grid = GridData()
    positions: List[complex] = []
    ids: List[str] = []
    for j in range(size + 1):
        for i in range(size + 1):
            grid.vertex[(i, j)] = len(positions)
            positions.append(delta * complex(i - 0.5, j - 0.5))
            ids.append(f"p{i}_{j}")
    faces: List[TFace] = []
    for q in range(size):
        for p in range(size):
            v = grid.vertex
            cycle = (v[(p, q)], v[(p + 1, q)], v[(p + 1, q + 1)], v[(p, q + 1)])
            color = Color.BLACK if (p + q) % 2 == 0 else Color.WHITE
            grid.face[(p, q)] = len(faces)
            grid.coords[len(faces)] = (p, q)
            faces.append(TFace(f"s{p}_{q}", color, cycle))
    te = TEmbedding(positions, faces, ids, mode, name, {"lattice": "square", "delta": delta})
    return te, grid


class SquareLattice(LatticeBuilder):
    """Checkerboard t-embedding of the square grid."""

    @property
    def kind(self) -> str:
        return "square"

    def tembedding(self) -> TEmbedding:
        te, self.grid = square_tembedding(self.size, self.delta, f"square-{self.size}", self.mode)
        return te

    def canonical_eta(self, te: TEmbedding) -> np.ndarray:
        eta = np.full(len(te.faces), np.nan + 0j, dtype=complex)
        for (p, q), f in self.grid.face.items():
            cls = square_class(p, q)
            if cls == "B_R":
                eta[f] = 1.0
            elif cls == "B_I":
                eta[f] = 1j
        return complete_eta(te, eta)

    def decorate(self, bundle: LatticeBundle) -> None:
        bundle.data = self.grid
        bundle.meta["classes"] = {c: sum(1 for k in self.grid.face if square_class(*k) == c)
                                  for c in ("B_R", "B_I", "W_lambda", "W_ilambda")}


def diamond_corners(grid: GridData, p: int, q: int) -> Tuple[int, int]:
    """The two opposite corners of square (p, q) where s-holomorphic values live (i + j odd)."""
    v = grid.vertex
    if (p + q) % 2 == 0:
        return v[(p + 1, q)], v[(p, q + 1)]
    return v[(p + 1, q + 1)], v[(p, q)]


def diamond_splitting(bundle: LatticeBundle) -> Splitting:
    """Split white squares along the diagonal joining their i + j even corners.

    Each sub-triangle then has one i + j odd corner off the diagonal, which
    is where the square-grid s-holomorphic value of that triangle sits.
    """
    grid: GridData = bundle.data
    anchors = {f: grid.vertex[(p + 1, q)] for (p, q), f in grid.face.items() if (p + q) % 2 == 1}
    return build_splitting(bundle.te, Color.WHITE, anchors)
