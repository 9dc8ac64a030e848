"""
Brute-force counting oracles for the fourcycle engines.
"""
