"""Exact verification toolkit for semistable abelian varieties with few bad primes."""

__version__ = "0.1.0"
