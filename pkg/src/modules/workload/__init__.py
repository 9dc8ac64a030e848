"""
Update stream parsing and synthetic workload generation.
"""
