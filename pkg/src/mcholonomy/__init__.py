"""Exact computations with curved L-infinity algebras on simplices."""
__version__ = "0.1.0"
