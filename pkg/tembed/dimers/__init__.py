"""Dimer model: inversion, matchings, heights."""
