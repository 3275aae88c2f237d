"""Desk-scale verification pipeline for the Jones unknot question on algebraic knot diagrams."""

__version__ = "0.1.0"
