"""Utility modules: codebook files, reports and published tables."""
