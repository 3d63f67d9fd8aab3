"""Genus-2 Jacobians over small prime fields: torsion, pairings and CM checks."""

__version__ = "0.1.0"
