"""Electron spins in a planar Penning-trap array as an NMR-style quantum register."""

__version__ = "0.1.0"
