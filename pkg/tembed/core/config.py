"""Experiment configuration for tembed.

A run is described by one JSON file validated into an ExperimentConfig;
command-line flags override the seed, the output directory and the
paranoid overlap check.
"""
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, Field, ValidationError, field_validator

from tembed.core.errors import ConfigError

logger = logging.getLogger(__name__)

PIPELINES = ("validate", "build-tgraph", "walk", "couple", "gff", "appendix", "probe", "report")
LATTICE_KINDS = ("square", "honeycomb", "isoradial-rhombic", "orthodiagonal", "s-embedding", "triangulation")


def to_complex(value: Union[float, List[float]]) -> complex:
    """[re, im] or a real number as a complex number."""
    if isinstance(value, (list, tuple)):
        return complex(value[0], value[1] if len(value) > 1 else 0.0)
    return complex(value)


class LatticeConfig(BaseModel):
    """Which t-embedding to run on."""
    kind: str = Field(default="square", description="Lattice kind, or 'file' to load `path`")
    size: int = Field(default=8, ge=2, description="Cells per side")
    delta: float = Field(default=1.0, gt=0, description="Mesh size")
    mode: str = Field(default="finite", description="finite or whole-plane")
    path: Optional[str] = Field(default=None, description="t-embedding JSON file when kind is 'file'")
    options: Dict[str, Any] = Field(default_factory=dict, description="Builder options (seed, theta, alphas, ...)")

    @field_validator("kind")
    @classmethod
    def _known_kind(cls, v: str) -> str:
        if v not in LATTICE_KINDS + ("file",):
            raise ValueError(f"unknown lattice kind {v!r}")
        return v

    @field_validator("mode")
    @classmethod
    def _known_mode(cls, v: str) -> str:
        if v not in ("finite", "whole-plane"):
            raise ValueError(f"unknown mode {v!r}")
        return v


class WalkConfig(BaseModel):
    """T-graph and walk parameters."""
    alphas: List[List[float]] = Field(default_factory=lambda: [[1.0, 0.0]], description="Unit α as [re, im]")
    flavor: str = Field(default="white-flat", description="white-flat (T + conj(α²O)) or black-flat (T + α²O)")
    horizon: float = Field(default=10.0, gt=0, description="Horizon of the recorded trajectories")
    n_walks: int = Field(default=4, ge=1, description="Number of recorded trajectories")
    start: Optional[str] = Field(default=None, description="Starting vertex id of T (default: central point)")


class ProbeConfig(BaseModel):
    """Regularity probe parameters; lengths are in units of δ and times in units of δ²."""
    kinds: List[str] = Field(default_factory=lambda: ["variance", "crossing", "oscillation"])
    t_values: List[float] = Field(default_factory=lambda: [4.0, 16.0])
    betas: List[List[float]] = Field(default_factory=lambda: [[1.0, 0.0], [0.0, 1.0]])
    lambdas: List[float] = Field(default_factory=lambda: [1.0, 2.0, 3.0])
    n_walks: int = Field(default=2000, ge=2)
    crossing_r: float = Field(default=20.0, gt=0, description="Half-height r of the crossing rectangle")
    backward: bool = Field(default=True, description="Also run the crossing probe for the backward walk")
    radii: List[float] = Field(default_factory=lambda: [4.0, 8.0, 16.0, 32.0])


class GffConfig(BaseModel):
    """Height-correlation experiment."""
    domain: str = Field(default="square", description="square or disk")
    n_points: int = Field(default=2, ge=1, le=4, description="Number of marked points")
    spacing: float = Field(default=0.25, gt=0, description="Spacing of the marked points, relative to the domain size")
    anchors: str = Field(default="boundary", description="Anchor choice for the height differences")


class CouplingConfig(BaseModel):
    """Coupling-function experiment."""
    anchor: Optional[str] = Field(default=None, description="White face id of the anchor (default: central)")


class ExperimentConfig(BaseModel):
    """One reproducible tembed run."""
    name: str = Field(default="experiment", description="Run name used in file names")
    pipeline: str = Field(default="validate", description="Pipeline to run")
    seed: int = Field(default=0, description="Seed for every stochastic step")
    out: str = Field(default="out", description="Output directory")
    paranoid: bool = Field(default=False, description="Run the global overlap check")
    sigma: List[float] = Field(default_factory=lambda: [0.7071067811865476, 0.7071067811865476],
                               description="Global phase ς of s-embeddings")
    lattice: LatticeConfig = Field(default_factory=LatticeConfig)
    walk: WalkConfig = Field(default_factory=WalkConfig)
    probe: ProbeConfig = Field(default_factory=ProbeConfig)
    gff: GffConfig = Field(default_factory=GffConfig)
    coupling: CouplingConfig = Field(default_factory=CouplingConfig)

    @field_validator("pipeline")
    @classmethod
    def _known_pipeline(cls, v: str) -> str:
        if v not in PIPELINES:
            raise ValueError(f"unknown pipeline {v!r}; expected one of {', '.join(PIPELINES)}")
        return v

    def canonical_json(self) -> str:
        """Sorted, compact JSON used for the config hash."""
        return json.dumps(self.model_dump(), sort_keys=True, separators=(",", ":"))


class ConfigManager:
    """Loads, overrides and validates experiment configurations."""

    # Override keys
    SEED = "seed"
    OUT = "out"
    PARANOID = "paranoid"
    PIPELINE = "pipeline"

    # Default values
    DEFAULT_OUT = "out"
    DEFAULT_SEED = 0

    def __init__(self, path: Optional[str] = None):
        self.path = Path(path) if path else None

    def _read(self) -> Dict[str, Any]:
        if self.path is None:
            return {}
        try:
            with open(self.path) as fh:
                data = json.load(fh)
        except FileNotFoundError:
            raise ConfigError("missing_config", f"config file {self.path} does not exist")
        except json.JSONDecodeError as e:
            raise ConfigError("bad_json", f"config file {self.path} is not valid JSON: {e}")
        if not isinstance(data, dict):
            raise ConfigError("bad_json", f"config file {self.path} must hold a JSON object")
        return data

    def load(self, overrides: Optional[Dict[str, Any]] = None) -> ExperimentConfig:
        """Read the file, apply non-None overrides and validate.

        Args:
            overrides: Top-level keys from the command line (seed, out, paranoid, pipeline)

        Returns:
            The validated ExperimentConfig

        Raises:
            ConfigError: if the file is missing, not JSON or fails the schema
        """
        data = self._read()
        for key, value in (overrides or {}).items():
            if value is not None:
                data[key] = value
        try:
            config = ExperimentConfig.model_validate(data)
        except ValidationError as e:
            first = e.errors()[0]
            where = ".".join(str(p) for p in first["loc"])
            raise ConfigError("invalid_config", f"invalid config: {first['msg']}", where)
        logger.debug(f"Loaded config {config.name} ({config.pipeline}) from {self.path or 'defaults'}")
        return config
