"""Locally constrained curvature flows of spacelike graphs in de Sitter space."""

__version__ = "0.1.0"
