"""Feasibility of capturing an on-channel gap filler (repeater).

A gap filler re-broadcasts whatever dominates its input. The attacker wins
when its signal at the repeater input beats the broadcaster by the capture
threshold while the composite input stays inside the repeater's accepted
level window.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from . import ccpr_db, gridsim
from .ccpr_db import CcprKey, Channel, Source


class Verdict(str, enum.Enum):
    SUCCESS = "Success"
    INSUFFICIENT_MARGIN = "InsufficientMargin"
    SATURATION = "Saturation"
    BELOW_SENSITIVITY = "BelowSensitivity"


@dataclass(frozen=True)
class GapFillerSpec:
    input_min: float = -77.0
    input_max: float = -7.0
    rx_antenna_gain: float = 11.0  # dBd
    output_erp: float = 42.0
    mode: CcprKey = CcprKey("DVB-T", "64QAM", "2/3", Channel.RICEAN, Source.M1)

    def __post_init__(self) -> None:
        if not self.input_min < self.input_max:
            raise ValueError("input_min must be below input_max")


@dataclass(frozen=True)
class GapFillerAttackInput:
    p_rbv: float  # broadcaster at the gap-filler input
    p_rav: float  # attacker at the gap-filler input
    p_rba: float | None = None  # broadcaster at the attacker, informational only


@dataclass(frozen=True)
class GapFillerResult:
    verdict: Verdict
    margin_db: float
    combined_input_dbm: float
    threshold_db: float

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "margin_db": self.margin_db,
            "combined_input_dbm": self.combined_input_dbm,
        }


def power_sum_dbm(*levels_dbm: float) -> float:
    """Sum of incoherent powers given in dBm."""
    finite = [p for p in levels_dbm if p != -math.inf]
    if not finite:
        return -math.inf
    top = max(finite)
    return top + 10.0 * math.log10(sum(10.0 ** ((p - top) / 10.0) for p in finite))


def capture_threshold(mode: CcprKey, use_ccpr: bool = False, ccpr_source: Source = Source.M2) -> float:
    """Margin the attacker needs at the repeater input.

    By default this is the mode's minimum C/N for its channel (the weak
    broadcaster residue behaves like noise at these margins). With
    ``use_ccpr`` the Gaussian two-signal protection ratio from ``ccpr_source``
    is used instead.
    """
    if use_ccpr:
        return ccpr_db.require(mode.with_(channel=Channel.GAUSSIAN, source=ccpr_source))
    return ccpr_db.require(mode.with_(source=Source.M1))


def evaluate(spec: GapFillerSpec, attack: GapFillerAttackInput, alpha: float | None = None) -> GapFillerResult:
    """Verdict for one set of input levels.

    The level window is checked on the power sum of both inputs, since the
    repeater amplifies the composite.
    """
    if alpha is None:
        alpha = capture_threshold(spec.mode)
    margin = attack.p_rav - attack.p_rbv
    combined = power_sum_dbm(attack.p_rav, attack.p_rbv)
    if combined > spec.input_max:
        verdict = Verdict.SATURATION
    elif combined < spec.input_min:
        verdict = Verdict.BELOW_SENSITIVITY
    elif margin >= alpha:
        verdict = Verdict.SUCCESS
    else:
        verdict = Verdict.INSUFFICIENT_MARGIN
    return GapFillerResult(verdict, margin, combined, alpha)


def downstream_interference(s: gridsim.Scenario, region=None, threads: int | None = 1) -> gridsim.ClassStats:
    """Location statistics for end users at the repeater's input frequency.

    ``s`` holds the attacker (aimed at the gap-filler site) as the rogue and
    the broadcaster as the regular transmitter.
    """
    return gridsim.statistics(gridsim.simulate(s, threads=threads), region)
