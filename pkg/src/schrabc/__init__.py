"""Boundary-absorbing Schrodinger solvers and their warped-phase Hermitian lift."""

__version__ = "0.1.0"
