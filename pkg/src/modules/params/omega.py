"""
Models of the rectangular matrix multiplication exponent omega(a, b, c).

omega(a, b, c) is the exponent for multiplying an n^a x n^b matrix by an n^b x n^c
matrix. Every model is monotone in each argument and never below the trivial output
and input size bound max(a + b, b + c).
"""

from abc import ABC, abstractmethod
from fractions import Fraction
from typing import Dict, Optional, Tuple

Point = Tuple[Fraction, Fraction, Fraction]

BEST_KNOWN_OMEGA = Fraction("2.371339")


def lower_bound(a: Fraction, b: Fraction, c: Fraction) -> Fraction:
    return max(a + b, b + c)


class OmegaModel(ABC):
    """Interface for omega(a, b, c) models."""

    name = "model"

    @abstractmethod
    def __call__(self, a: Fraction, b: Fraction, c: Fraction) -> Fraction:
        """Exponent of the (a, b, c) rectangular product."""
        pass

    def square(self) -> Fraction:
        """Square exponent omega = omega(1, 1, 1)."""
        one = Fraction(1)
        return self(one, one, one)


class BestPossible(OmegaModel):
    """omega(a, b, c) = max(a + b, b + c), i.e. square omega = 2."""

    name = "best"

    def __call__(self, a: Fraction, b: Fraction, c: Fraction) -> Fraction:
        return lower_bound(a, b, c)


class SquareInterp(OmegaModel):
    """
    Padding to square blocks.

    With s = min(a, b, c) the product splits into n^(a+b+c-3s) square products of side
    n^s, giving (a + b + c - 3s) + omega * s.
    """

    name = "square"

    def __init__(self, omega: Fraction):
        self.omega = Fraction(omega)

    def __call__(self, a: Fraction, b: Fraction, c: Fraction) -> Fraction:
        s = min(a, b, c)
        return max(a + b + c - 3 * s + self.omega * s, lower_bound(a, b, c))


class TableDriven(OmegaModel):
    """
    Sampled exponents with conservative lookup.

    A point takes the smallest sample value among samples that dominate it in every
    coordinate (monotonicity makes those upper bounds), capped by the square-padding
    fallback.
    """

    name = "table"

    def __init__(self, omega: Fraction, samples: Optional[Dict[Point, Fraction]] = None):
        self.fallback = SquareInterp(omega)
        self.samples: Dict[Point, Fraction] = {}
        for point, value in (samples or {}).items():
            key = tuple(Fraction(x) for x in point)
            self.samples[key] = Fraction(value)

    def __call__(self, a: Fraction, b: Fraction, c: Fraction) -> Fraction:
        best = self.fallback(a, b, c)
        for (sa, sb, sc), value in self.samples.items():
            if sa >= a and sb >= b and sc >= c and value < best:
                best = value
        return max(best, lower_bound(a, b, c))


def current_best_table() -> TableDriven:
    """Table model for the best known square exponent with its two rectangular samples."""
    return TableDriven(
        BEST_KNOWN_OMEGA,
        {
            (Fraction("0.375353"), Fraction("0.6246471"), Fraction("0.375353")): Fraction("1.10495201"),
            (Fraction("0.6862885"), Fraction("0.436994434"), Fraction("0.436994434")): Fraction("1.24039952"),
        },
    )


def build_model(name: str, omega: Fraction = BEST_KNOWN_OMEGA) -> OmegaModel:
    """
    Build a model by configuration name.

    Args:
        name: best, square or table
        omega: Square exponent for the square and table models
    """
    if name == "best":
        return BestPossible()
    if name == "square":
        return SquareInterp(omega)
    if name == "table":
        if Fraction(omega) == BEST_KNOWN_OMEGA:
            return current_best_table()
        return TableDriven(omega)
    raise ValueError(f"Unknown omega model: {name}")
