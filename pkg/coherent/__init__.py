# This file marks the `coherent` directory as a Python package.

__version__ = "0.1.0"
