"""Main engine: phases, degree classes, transitions and table-driven queries."""

from modules.engines.main.engine import MainEngine, expected_bucket_sums

__all__ = ["MainEngine", "expected_bucket_sums"]
