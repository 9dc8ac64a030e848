"""
Exponent parameters, omega models and degree thresholds.
"""
