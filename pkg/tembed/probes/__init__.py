"""Regularity probes."""
