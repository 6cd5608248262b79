"""Sketch-conditioned scene synthesis: dataset tooling, models, metrics, service."""

__version__ = "0.1.0"
