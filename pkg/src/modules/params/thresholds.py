"""
Integer thresholds for a reference edge count.

Thresholds are frozen at a reference edge count m_hat; engines rebuild when the live
edge count leaves [m_hat / 2, 2 * m_hat].
"""

import logging
import math
from fractions import Fraction
from typing import Optional

from pydantic import BaseModel, ConfigDict, model_validator

from core.errors import BootstrapRange
from modules.params.constraints import THIRD, ParamSet

logger = logging.getLogger(__name__)

EXACT_DENOMINATOR_LIMIT = 1000


def ceil_power(m: int, exponent: Fraction) -> int:
    """
    Ceiling of m ** exponent.

    Exact with integer arithmetic when the exponent's denominator is small, so perfect
    powers such as (2**24) ** (5/8) land exactly on 2**15.
    """
    exponent = Fraction(exponent)
    if m <= 1 or exponent == 0:
        return 1 if m >= 1 or exponent == 0 else 0
    estimate = math.ceil(m ** float(exponent) - 1e-9)
    p, q = exponent.numerator, exponent.denominator
    if q > EXACT_DENOMINATOR_LIMIT or p < 0:
        return max(estimate, 1)
    target = m**p
    candidate = max(estimate, 1)
    while candidate**q < target:
        candidate += 1
    while candidate > 1 and (candidate - 1) ** q >= target:
        candidate -= 1
    return candidate


class Thresholds(BaseModel):
    """Degree, chunk, phase and budget thresholds frozen at a reference edge count."""

    model_config = ConfigDict(frozen=True)

    m_hat: int = 0
    tiny: int
    medium: int
    high: int
    chunk_size: int
    chunk_sparse: int
    phase_size: int
    per_update_budget: int
    chunk_job_work_cap: int = 0
    phase_job_work_cap: int = 0
    warmup_high: Optional[int] = None
    warmup_medium: Optional[int] = None

    @model_validator(mode='after')
    def validate_order(self):
        """Validate strictly ordered degree bands and positive sizes."""
        if not (0 < self.tiny < self.medium < self.high):
            raise ValueError(f"Thresholds must satisfy 0 < tiny < medium < high, got {self.tiny}, {self.medium}, {self.high}")
        if self.chunk_size < 1 or self.phase_size < 1 or self.per_update_budget < 1:
            raise ValueError("Chunk size, phase size and per-update budget must be positive")
        if self.warmup_high is not None and self.warmup_medium is not None:
            if not (0 < self.warmup_medium < self.warmup_high):
                raise ValueError("Warm-up thresholds must satisfy 0 < medium < high")
        return self

    @property
    def warmup_classes(self):
        """(medium, high) degree thresholds for the warm-up engine."""
        high = self.warmup_high if self.warmup_high is not None else self.high
        medium = self.warmup_medium if self.warmup_medium is not None else self.medium
        return medium, high

    def in_window(self, m: int) -> bool:
        """Whether the live edge count is still inside [m_hat / 2, 2 * m_hat]."""
        return 2 * m >= self.m_hat and m <= 2 * self.m_hat


def thresholds_for(
    m_hat: int,
    p: ParamSet,
    budget_multiplier: float = 4.0,
    bootstrap_min: int = 1,
) -> Thresholds:
    """
    Concretize a parameter set into integer thresholds.

    Args:
        m_hat: Reference edge count
        p: Parameter set
        budget_multiplier: Per-update budget as a multiple of the high threshold
        bootstrap_min: Smallest reference edge count accepted

    Returns:
        Thresholds: Frozen thresholds

    Raises:
        BootstrapRange: If m_hat is below the minimum or the bands collide
    """
    if m_hat < max(bootstrap_min, 1):
        raise BootstrapRange(f"Reference edge count {m_hat} below bootstrap minimum {bootstrap_min}")
    eps, eps1, eps2, delta = p.epsilon, p.epsilon1, p.epsilon2, p.delta
    tiny = ceil_power(m_hat, THIRD - 2 * eps)
    medium = ceil_power(m_hat, THIRD + eps)
    high = ceil_power(m_hat, 2 * THIRD - eps)
    if not (tiny < medium < high):
        raise BootstrapRange(f"Bands collide at m_hat={m_hat}: tiny={tiny}, medium={medium}, high={high}")
    warmup_medium = ceil_power(m_hat, THIRD + eps1)
    warmup_high = ceil_power(m_hat, 2 * THIRD - eps1)
    if not (warmup_medium < warmup_high):
        raise BootstrapRange(f"Warm-up bands collide at m_hat={m_hat}")
    chunk_size = ceil_power(m_hat, 2 * THIRD - eps1)
    chunk_sparse = ceil_power(m_hat, THIRD - eps2)
    phase_size = ceil_power(m_hat, 1 - delta)
    chunk_cap = ceil_power(m_hat, 4 * THIRD - 2 * eps1)
    side = 2 * THIRD + 2 * eps
    phase_cap = ceil_power(m_hat, p.omega(side, side, side))
    budget = max(
        math.ceil(budget_multiplier * high),
        -(-chunk_cap // chunk_size),
        -(-phase_cap // phase_size),
    )
    thresholds = Thresholds(
        m_hat=m_hat,
        tiny=tiny,
        medium=medium,
        high=high,
        chunk_size=chunk_size,
        chunk_sparse=chunk_sparse,
        phase_size=phase_size,
        per_update_budget=budget,
        chunk_job_work_cap=chunk_cap,
        phase_job_work_cap=phase_cap,
        warmup_high=warmup_high,
        warmup_medium=warmup_medium,
    )
    logger.debug(f"Thresholds for m_hat={m_hat}: {thresholds}")
    return thresholds


def min_feasible_edges(p: ParamSet, bootstrap_min: int = 1, limit: int = 10**7) -> int:
    """
    Smallest m_hat >= bootstrap_min with strictly ordered bands.

    Raises:
        BootstrapRange: If none exists below the search limit
    """
    for m_hat in range(max(bootstrap_min, 1), limit):
        try:
            thresholds_for(m_hat, p, bootstrap_min=bootstrap_min)
        except BootstrapRange:
            continue
        return m_hat
    raise BootstrapRange(f"No feasible reference edge count below {limit}")
