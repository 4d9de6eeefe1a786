"""Exact cumulants of the von Neumann entanglement entropy of random bipartite states."""

from .exactalg import S_CONTEXT, T_CONTEXT, Polynomial, RationalFunction, VarContext
from .symexpr import Base, InvariantError, PolygammaFactor, SymExpr

__version__ = "0.1.0"

__all__ = [
    "Base",
    "InvariantError",
    "PolygammaFactor",
    "Polynomial",
    "RationalFunction",
    "S_CONTEXT",
    "SymExpr",
    "T_CONTEXT",
    "VarContext",
]
