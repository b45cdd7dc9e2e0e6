"""Simulated automated CCPR measurement.

A fixed-power reference transmitter stands in for the regular broadcast and a
rogue transmitter starts well above it. The controller lowers the rogue power
one step at a time and watches the receiver: a signal counts as received only
if lock is held for the whole dwell period. The estimate is the lowest
rogue-to-regular ratio at which the receiver still held the rogue.

Along the sweep the receiver passes through three states: rogue locked, mush
(neither locked), and regular locked.
"""
from __future__ import annotations

import enum
import statistics
from dataclasses import dataclass, field
from typing import Protocol


class LockState(str, enum.Enum):
    ROGUE = "rogue"
    MUSH = "mush"
    REGULAR = "regular"


class TransitionNotObserved(RuntimeError):
    pass


class Receiver(Protocol):
    def locked(self, state: LockState, ratio_db: float) -> LockState:
        """Signal the receiver decodes at ``ratio_db`` (rogue minus regular)
        given it was in ``state`` on the previous tick."""


@dataclass(frozen=True)
class ReceiverModel:
    """Deterministic threshold receiver.

    Keeping an existing lock needs the ratio to meet the CCPR; acquiring a
    new lock needs the CCPR plus ``hysteresis``. ``ccpr_regular`` defaults to
    ``true_ccpr`` (both transmitters in the same mode).
    """

    true_ccpr: float
    lock_acquire_time: int = 1  # ticks
    hysteresis: float = 0.0
    ccpr_regular: float | None = None

    def __post_init__(self) -> None:
        if self.hysteresis < 0:
            raise ValueError("hysteresis must be >= 0")
        if self.lock_acquire_time < 0:
            raise ValueError("lock acquisition time must be >= 0")

    @property
    def regular_ccpr(self) -> float:
        return self.true_ccpr if self.ccpr_regular is None else self.ccpr_regular

    def locked(self, state: LockState, ratio_db: float) -> LockState:
        rogue_need = self.true_ccpr + (0.0 if state is LockState.ROGUE else self.hysteresis)
        reg_need = self.regular_ccpr + (0.0 if state is LockState.REGULAR else self.hysteresis)
        if ratio_db >= rogue_need:
            return LockState.ROGUE
        if -ratio_db >= reg_need:
            return LockState.REGULAR
        return LockState.MUSH


@dataclass(frozen=True)
class MeasurementConfig:
    p_fixed: float = -60.0
    p_start: float | None = None  # defaults to p_fixed + start_margin
    start_margin: float = 20.0
    step: float = 1.0
    dwell_ticks: int = 10
    max_steps: int = 10_000

    def __post_init__(self) -> None:
        if not self.step > 0:
            raise ValueError("step must be > 0")
        if self.dwell_ticks < 1:
            raise ValueError("dwell must be at least one tick")

    @property
    def start(self) -> float:
        return self.p_fixed + self.start_margin if self.p_start is None else self.p_start


@dataclass(frozen=True)
class TraceStep:
    index: int
    p_rogue: float
    ratio_db: float
    state: LockState


@dataclass
class MeasurementRun:
    config: MeasurementConfig
    trace: list[TraceStep] = field(default_factory=list)
    estimate_db: float | None = None


def _observe(rx: Receiver, state: LockState, ratio: float, settle: int, dwell: int) -> LockState:
    """Run one power step tick by tick and report the steadily held state."""
    held = state
    pending, count = None, 0
    observed = []
    for _ in range(settle + dwell):
        want = rx.locked(held, ratio)
        if want is not held:
            # losing a lock is immediate, acquiring one takes `settle` ticks
            held = LockState.MUSH
            if want is not LockState.MUSH:
                count = count + 1 if pending is want else 1
                pending = want
                if count >= settle:
                    held, pending, count = want, None, 0
        observed.append(held)
    window = observed[-dwell:]
    if all(s is window[0] for s in window):
        return window[0]
    return LockState.MUSH


def run_measurement(rx: Receiver, cfg: MeasurementConfig) -> MeasurementRun:
    settle = getattr(rx, "lock_acquire_time", 0)
    run = MeasurementRun(cfg)
    state = LockState.MUSH
    margin0 = cfg.start - cfg.p_fixed
    for k in range(cfg.max_steps):
        ratio = margin0 - k * cfg.step
        state = _observe(rx, state, ratio, settle, cfg.dwell_ticks)
        run.trace.append(TraceStep(k, cfg.p_fixed + ratio, ratio, state))
        if k == 0 and state is not LockState.ROGUE:
            raise TransitionNotObserved(
                f"receiver did not hold the rogue signal at the start ratio {ratio:.2f} dB; raise p_start"
            )
        if state is LockState.ROGUE:
            run.estimate_db = ratio
        if state is LockState.REGULAR:
            return run
    raise TransitionNotObserved(f"regular lock not reached within {cfg.max_steps} steps")


def three_state_trace(run: MeasurementRun) -> list[LockState]:
    return [t.state for t in run.trace]


def is_monotone(states: list[LockState]) -> bool:
    """True when the sequence reads rogue*, mush*, regular* with no interleaving."""
    order = {LockState.ROGUE: 0, LockState.MUSH: 1, LockState.REGULAR: 2}
    ranks = [order[s] for s in states]
    return all(a <= b for a, b in zip(ranks, ranks[1:]))


def mush_width(run: MeasurementRun) -> float:
    """Ratio span covered by mush steps, in dB."""
    return sum(1 for t in run.trace if t.state is LockState.MUSH) * run.config.step


@dataclass(frozen=True)
class RepeatSummary:
    estimates: tuple[float, ...]

    @property
    def min(self) -> float:
        return min(self.estimates)

    @property
    def median(self) -> float:
        return statistics.median(self.estimates)

    @property
    def max(self) -> float:
        return max(self.estimates)


def repeat_measurement(rx: Receiver, cfg: MeasurementConfig, repeats: int = 10) -> RepeatSummary:
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    return RepeatSummary(tuple(run_measurement(rx, cfg).estimate_db for _ in range(repeats)))
