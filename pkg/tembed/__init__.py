"""tembed - t-embeddings, origami maps and the dimer model."""
from tembed.version import VERSION

__all__ = ["VERSION"]
