"""Tetrahedron-state quantum key distribution: exact analysis and simulation."""

from .cli import main

__all__ = ["main"]
