"""
Entropy Bounds
==============

Generalized entropy, entropy-difference bounds and the learning experiments
built on them.
"""

__version__ = "0.1.0"
