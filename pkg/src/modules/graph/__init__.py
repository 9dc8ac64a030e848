"""
Layered graph model and general-graph reduction for the fourcycle engines.
"""
