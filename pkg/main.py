#!/usr/bin/env python3
"""
topos-measure - Invariant measures and modular flow on finite groupoid actions
Entry point for the application
"""

from topos_measure.main import main

if __name__ == "__main__":
    main()
