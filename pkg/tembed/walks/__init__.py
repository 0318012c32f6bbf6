"""T-graphs and their random walks."""
