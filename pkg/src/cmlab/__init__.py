"""Exact computations on CM abelian varieties presented by finite Galois data."""

from . import cmspec, engine, galois, hermitian, pkls, weiltype, zlattice

__version__ = "0.1.0"

__all__ = ["cmspec", "engine", "galois", "hermitian", "pkls", "weiltype", "zlattice"]
