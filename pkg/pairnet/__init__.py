"""
pairnet - partitioned-pairs network optimization.

Red/blue 2-MST, 2-TSP and 2-matching: approximation algorithms, exact
brute-force oracles, tight-instance generators and SAT hardness reductions.
"""

__version__ = "0.1.0"
