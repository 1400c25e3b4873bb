"""Online secretary-style matching algorithms, offline oracles and a Monte Carlo harness."""

__version__ = "0.1.0"
