"""Dimer graphs and duals."""
