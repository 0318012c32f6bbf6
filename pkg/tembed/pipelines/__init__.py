"""Experiment pipelines and reports."""
