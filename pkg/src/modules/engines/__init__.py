"""
Counting engines: naive, warm-up and main.
"""
