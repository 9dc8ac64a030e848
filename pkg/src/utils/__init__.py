"""
Utility modules for the fourcycle engines.
"""
