"""Entanglement adjacency matrix toolkit.

Block entropies of pure states over all bipartitions, least-squares link
weights reproducing them, per-site contours, and continuum checks.
"""
from .kernels import BACKEND

__version__ = "0.1.0"
