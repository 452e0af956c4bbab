"""
topos-measure - Invariant measures and modular flow on finite boolean toposes
"""

__version__ = "0.1.0"
