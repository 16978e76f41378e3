"""Exact lower bounds and Monte Carlo estimates for the accumulate
distribution of the minimum cut capacity of weighted random graphs."""

__version__ = "0.1.0"
