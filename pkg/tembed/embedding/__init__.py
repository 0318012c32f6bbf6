"""T-embeddings, origami maps and splittings."""
