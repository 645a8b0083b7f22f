"""Utility functions for assoc-clt."""

from .helpers import calculate_verdict, chunk_bounds, run_with_concurrency_limit

__all__ = ["calculate_verdict", "chunk_bounds", "run_with_concurrency_limit"]
