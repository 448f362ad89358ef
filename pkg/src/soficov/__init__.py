"""Canonical covers of sofic shifts from finite labeled-graph presentations."""

__version__ = "0.1.0"
