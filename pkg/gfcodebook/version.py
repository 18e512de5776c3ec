"""Version information for gfcodebook."""

__version__ = '0.1.0'
