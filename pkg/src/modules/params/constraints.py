"""
Exponent parameter sets, constraint checking and the grid solver.

All comparisons use exact Fractions; the published parameter points satisfy some
constraints with slack around 1e-6, so floats are only used for reporting.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List

from pydantic import BaseModel, ConfigDict, field_validator

from core.config import parse_fraction
from core.errors import Infeasible, InvalidParam
from modules.params.omega import BestPossible, OmegaModel, build_model

logger = logging.getLogger(__name__)

THIRD = Fraction(1, 3)
SIXTH = Fraction(1, 6)


class ParamSet(BaseModel):
    """The exponents epsilon, epsilon1, epsilon2, delta and an omega model."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    epsilon: Fraction
    epsilon1: Fraction
    epsilon2: Fraction
    delta: Fraction
    omega: OmegaModel = BestPossible()

    @field_validator('epsilon', 'epsilon1', 'epsilon2', 'delta', mode='before')
    @classmethod
    def validate_exponent(cls, v):
        """Parse exponents exactly."""
        return parse_fraction(v)

    @classmethod
    def from_config(cls, params_config: Dict[str, Any]) -> "ParamSet":
        """Build from the ``params`` configuration section."""
        model = build_model(params_config["omega_model"], parse_fraction(params_config["omega"]))
        return cls(
            epsilon=params_config["epsilon"],
            epsilon1=params_config["epsilon1"],
            epsilon2=params_config["epsilon2"],
            delta=params_config["delta"],
            omega=model,
        )

    def __str__(self) -> str:
        return (
            f"eps={self.epsilon} delta={self.delta} eps1={self.epsilon1} "
            f"eps2={self.epsilon2} omega={self.omega.name}"
        )


@dataclass(frozen=True)
class ConstraintCheck:
    """One evaluated inequality lhs <= rhs."""

    name: str
    lhs: Fraction
    rhs: Fraction

    @property
    def slack(self) -> Fraction:
        return self.rhs - self.lhs

    @property
    def ok(self) -> bool:
        return self.lhs <= self.rhs

    def as_row(self) -> Dict[str, Any]:
        return {"name": self.name, "lhs": float(self.lhs), "rhs": float(self.rhs), "slack": float(self.slack)}


def constraint_report(p: ParamSet) -> List[ConstraintCheck]:
    """
    Evaluate every constraint, satisfied or not.

    Args:
        p: Parameter set

    Returns:
        list: One ConstraintCheck per inequality, range checks first
    """
    eps, eps1, eps2, delta = p.epsilon, p.epsilon1, p.epsilon2, p.delta
    omega = p.omega
    square = omega.square()
    checks: List[ConstraintCheck] = []
    for name, value in (("epsilon", eps), ("epsilon1", eps1), ("epsilon2", eps2), ("delta", delta)):
        checks.append(ConstraintCheck(f"range_{name}_low", -value, Fraction(0)))
        checks.append(ConstraintCheck(f"range_{name}_high", value, THIRD))
    checks.extend([
        ConstraintCheck("C1", omega(THIRD + eps1, 2 * THIRD - eps1, THIRD + eps1), 4 * THIRD - 2 * eps1),
        ConstraintCheck(
            "C2",
            omega(2 * THIRD + 2 * eps, THIRD - eps1 + eps2, THIRD - eps1 + eps2),
            4 * THIRD - 2 * eps1,
        ),
        ConstraintCheck("C3", 3 * eps1 + 2 * eps, eps2),
        ConstraintCheck("C4", (2 * square + 1) * eps + (square - 1) * 2 * THIRD, 1 - delta),
        ConstraintCheck("C5", 3 * eps, delta),
        ConstraintCheck("C6a", eps1, SIXTH),
        ConstraintCheck("C6b", eps1 - eps2, THIRD),
        ConstraintCheck("C7", eps, SIXTH),
        ConstraintCheck("C8", eps, eps1),
    ])
    return checks


def check_constraints(p: ParamSet) -> List[ConstraintCheck]:
    """Violated constraints only; empty iff the parameter set is feasible."""
    return [check for check in constraint_report(p) if not check.ok]


def grid(resolution: Fraction) -> List[Fraction]:
    """Grid points 0, r, 2r, ... up to 1/3."""
    resolution = Fraction(resolution)
    if resolution <= 0:
        raise InvalidParam("Resolution must be positive")
    points = []
    k = 0
    while k * resolution <= THIRD:
        points.append(k * resolution)
        k += 1
    return points


def solve_params(model: OmegaModel, resolution: Fraction, strict_positive: bool = False) -> ParamSet:
    """
    Grid search for the feasible parameter set with the largest epsilon.

    Ties break toward larger delta, then larger epsilon1, then smaller epsilon2.

    Args:
        model: omega model
        resolution: Grid step
        strict_positive: Reject epsilon = 0

    Returns:
        ParamSet: The best feasible grid point

    Raises:
        Infeasible: If no grid point satisfies every constraint
    """
    points = grid(resolution)
    square = model.square()
    descending = list(reversed(points))
    for eps in descending:
        if strict_positive and eps == 0:
            continue
        if eps > SIXTH:
            continue
        for delta in descending:
            if 3 * eps > delta or (2 * square + 1) * eps + (square - 1) * 2 * THIRD > 1 - delta:
                continue
            for eps1 in descending:
                if eps1 < eps or eps1 > SIXTH:
                    continue
                for eps2 in points:
                    candidate = ParamSet(epsilon=eps, epsilon1=eps1, epsilon2=eps2, delta=delta, omega=model)
                    if not check_constraints(candidate):
                        logger.info(f"Solved parameters: {candidate}")
                        return candidate
    raise Infeasible(f"No feasible parameters on the {resolution} grid for the {model.name} model")
