"""Closed-form attack geometry.

The regular broadcast is assumed to arrive at a constant level ``pr_reg``
across the attacked area and shadowing is ignored, so the attacker-controlled
area is a disc around the rogue transmitter and the mush zone an annulus
around it.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

from .propagation import (
    LOSS_ROUNDING_DB,
    PathLossModel,
    PropagationDomainError,
    PropagationParams,
    distance_for_loss,
    mean_path_loss,
)


class AttackInfeasibleError(PropagationDomainError):
    """The attack radius would fall inside the reference distance ``d0``.

    ``radius`` holds the unclamped value from the closed-form expression so
    callers can tell "no coverage" apart from "coverage only inside d0".
    """

    def __init__(self, radius: float, d0: float) -> None:
        super().__init__(f"attack radius {radius:.3f} m is inside the reference distance d0 = {d0} m")
        self.radius = radius
        self.d0 = d0


def can_receive(pr_wanted: float, pr_unwanted: float, alpha_wanted: float) -> bool:
    """Whether the wanted signal clears the unwanted one by its protection ratio."""
    return pr_wanted >= pr_unwanted + alpha_wanted


@dataclass(frozen=True)
class AttackGeometry:
    """Rogue transmitter power, constant regular level, CCPRs and propagation."""

    pt_rogue: float
    pr_reg: float
    alpha_rogue: float
    alpha_reg: float = 0.0
    params: PropagationParams = field(default_factory=PropagationParams.fspl)
    f: float = 500.0

    def __post_init__(self) -> None:
        if self.alpha_rogue < 0 or self.alpha_reg < 0:
            raise ValueError("protection ratios must be non-negative")
        if self.pr_reg >= self.pt_rogue:
            warnings.warn(
                f"regular level {self.pr_reg} dBm is not below rogue power {self.pt_rogue} dBm",
                stacklevel=2,
            )


def _radius_for_budget(budget_db: float, g: AttackGeometry) -> float:
    # budget_db is the path loss the rogue signal may suffer at the boundary
    p = g.params
    if p.model is PathLossModel.LOG_DISTANCE:
        pl0 = p.reference_loss(g.f)
        if budget_db < pl0 - LOSS_ROUNDING_DB:
            radius = p.d0 * 10.0 ** ((budget_db - pl0) / (10.0 * p.n))
            raise AttackInfeasibleError(radius, p.d0)
    return distance_for_loss(budget_db, p, g.f)


def max_attack_radius(g: AttackGeometry) -> float:
    """Largest distance from the rogue transmitter at which its signal is decodable.

    ``d0 * 10 ** ((pt_rogue - pr_reg - alpha_rogue - PL0) / (10 n))`` for the
    log-distance part; the free-space model and the near segment of the
    two-slope model invert the free-space formula instead.
    """
    return _radius_for_budget(g.pt_rogue - g.pr_reg - g.alpha_rogue, g)


def affected_radius(g: AttackGeometry) -> float:
    """Outer mush-zone radius, where the regular signal regains its protection ratio."""
    return _radius_for_budget(g.pt_rogue - g.pr_reg + g.alpha_reg, g)


def controlled_area(d_rogue: float) -> float:
    """Disc area in square meters."""
    if d_rogue < 0:
        raise ValueError("radius must be non-negative")
    return math.pi * d_rogue**2


def required_power(d_rogue: float, g: AttackGeometry) -> float:
    """Rogue power (dBm) needed to control a disc of radius ``d_rogue``.

    ``g.pt_rogue`` is ignored. Raises below ``d0`` for the log-distance model.
    """
    return g.pr_reg + g.alpha_rogue + mean_path_loss(d_rogue, g.params, g.f)


def radius_ratio(alpha_rogue: float, alpha_reg: float, n: float) -> float:
    """Controlled radius over affected radius, ``10 ** (-(a_rogue + a_reg) / (10 n))``."""
    if not n >= 1:
        raise ValueError(f"path-loss exponent must be >= 1, got {n}")
    return 10.0 ** (-(alpha_rogue + alpha_reg) / (10.0 * n))


def area_fraction(alpha_rogue: float, alpha_reg: float, n: float) -> float:
    """Controlled area over affected area, ``10 ** (-(a_rogue + a_reg) / (5 n))``."""
    if not n >= 1:
        raise ValueError(f"path-loss exponent must be >= 1, got {n}")
    return 10.0 ** (-(alpha_rogue + alpha_reg) / (5.0 * n))


def mush_multiple(alpha_rogue: float, alpha_reg: float, n: float) -> float:
    """Mush-zone area as a multiple of the controlled area."""
    frac = area_fraction(alpha_rogue, alpha_reg, n)
    return (1.0 - frac) / frac


@dataclass(frozen=True)
class AreaReport:
    d_rogue: float
    a_rogue: float
    d_reg: float
    radius_ratio: float
    controlled_fraction: float
    mush_fraction: float

    @property
    def a_rogue_km2(self) -> float:
        return self.a_rogue / 1e6


def area_report(g: AttackGeometry) -> AreaReport:
    d_rogue = max_attack_radius(g)
    d_reg = affected_radius(g)
    ratio = d_rogue / d_reg
    frac = ratio**2
    return AreaReport(
        d_rogue=d_rogue,
        a_rogue=controlled_area(d_rogue),
        d_reg=d_reg,
        radius_ratio=ratio,
        controlled_fraction=frac,
        mush_fraction=1.0 - frac,
    )
