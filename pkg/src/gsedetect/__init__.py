"""Fault-detecting circuits for a superfast-encoded spinless Hubbard lattice."""

__version__ = "0.1.0"
