"""Lattice frameworks."""
