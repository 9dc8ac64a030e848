"""
Exact integer matrix products and deferred product jobs.
"""
