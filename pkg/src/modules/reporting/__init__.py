"""
Reporting module for bench, params and verify output.
"""
