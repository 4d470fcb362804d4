"""Bitset graph cores, canonical labeling, Ramsey censuses, gluing, and SAT search."""

__version__ = "0.1.0"
