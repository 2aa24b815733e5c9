"""Synthetic market generators for fixtures and benchmarks."""
