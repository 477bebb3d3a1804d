"""Exact computations with toric varieties: fans, divisors, conoids and embeddings."""

__version__ = "0.1.0"
