"""Error types for tembed.

Every failure raised by the library is a TEmbedError carrying a short
machine-readable error_type next to the human message, so the CLI can
log and map it to an exit code without string matching.
"""
from typing import Optional


class TEmbedError(Exception):
    """Base error for all tembed operations."""

    def __init__(self, error_type: str, message: str, location: Optional[str] = None,
                 value: Optional[float] = None):
        super().__init__(message)
        self.error_type = error_type  # "non_planar", "singular", "not_solvable", ...
        self.message = message
        self.location = location
        self.value = value  # offending residual, when there is one

    def __str__(self) -> str:
        if self.location:
            return f"{self.message} (at {self.location})"
        return self.message

    def to_dict(self) -> dict:
        return {
            "error_type": self.error_type,
            "message": self.message,
            "location": self.location,
            "value": self.value,
        }


class GraphError(TEmbedError):
    """Invalid dimer graph, dual request or gauge."""


class EmbeddingError(TEmbedError):
    """Invalid t-embedding, origami data or circle pattern."""


class HolomorphyError(TEmbedError):
    """Extension, primitive or coupling-observable failure."""


class WalkError(TEmbedError):
    """T-graph construction, rate or simulation failure."""


class DimerError(TEmbedError):
    """Kasteleyn inversion, matching or correlation failure."""


class LatticeError(TEmbedError):
    """Lattice framework construction or translation failure."""


class ProbeError(TEmbedError):
    """Regularity probe outside its regime."""


class ConfigError(TEmbedError):
    """Invalid experiment configuration."""


class PipelineError(TEmbedError):
    """Missing or inconsistent run artifacts."""
