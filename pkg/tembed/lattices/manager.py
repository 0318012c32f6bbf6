"""Unified lattice manager for tembed.

Provides a single entry point for every regular construction:
- square-grid checkerboard
- honeycomb (equilateral triangles) and random isoradial triangulations
- isoradial rhombic lattices and perturbed s-embeddings of the Ising model
- orthodiagonal rectangular grids
"""
import logging
from typing import Dict, List, Type

from tembed.core.errors import LatticeError
from tembed.lattices.base import LatticeBuilder, LatticeBundle
from tembed.lattices.honeycomb import HoneycombLattice
from tembed.lattices.ising import IsoradialLattice, SEmbeddingLattice
from tembed.lattices.orthodiagonal import OrthodiagonalGrid
from tembed.lattices.square import SquareLattice
from tembed.lattices.triangulation import RandomTriangulation

logger = logging.getLogger(__name__)


class LatticeManager:
    """Maps lattice kinds to their builders."""

    def __init__(self):
        self._builders: Dict[str, Type[LatticeBuilder]] = {
            "square": SquareLattice,
            "honeycomb": HoneycombLattice,
            "isoradial-rhombic": IsoradialLattice,
            "orthodiagonal": OrthodiagonalGrid,
            "s-embedding": SEmbeddingLattice,
            "triangulation": RandomTriangulation,
        }

    @property
    def kinds(self) -> List[str]:
        return sorted(self._builders)

    def _get_builder(self, kind: str) -> Type[LatticeBuilder]:
        """Get the builder class for a lattice kind.

        Raises:
            LatticeError: if the kind is unknown
        """
        builder = self._builders.get(kind)
        if builder is None:
            raise LatticeError("unknown_lattice", f"unknown lattice kind {kind!r}; expected one of "
                                                  f"{', '.join(self.kinds)}")
        return builder

    def build(self, kind: str, size: int, delta: float = 1.0, **options) -> LatticeBundle:
        """Build a lattice bundle.

        Args:
            kind: Lattice kind
            size: Number of cells per side (at least 2)
            delta: Mesh size
            **options: Builder-specific options (mode, seed, alphas, theta, jitter, ...)

        Returns:
            LatticeBundle with t-embedding, η, O and framework data
        """
        builder = self._get_builder(kind)(size, delta, **options)
        logger.debug(f"Building {kind} lattice of size {size} with options {sorted(options)}")
        return builder.build()


_manager = LatticeManager()


def regular_lattices(kind: str, size: int, delta: float = 1.0, **options) -> LatticeBundle:
    """Build one of the regular lattices by kind; see LatticeManager.build."""
    return _manager.build(kind, size, delta, **options)


def lattice_kinds() -> List[str]:
    return _manager.kinds
