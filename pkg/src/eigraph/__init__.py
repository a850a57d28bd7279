"""Computing with edge-indexed graphs: deformation moves, covering theory,
the modular homomorphism, smooth-number sieves, and machine-checkable
commation certificates."""

from .core import EIGraph, degree_profile, isomorphic, validate

__all__ = ["EIGraph", "degree_profile", "isomorphic", "validate"]
__version__ = "0.1.0"
