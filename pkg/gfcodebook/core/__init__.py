"""Core modules: field tower, characters, constructions and analysis."""
