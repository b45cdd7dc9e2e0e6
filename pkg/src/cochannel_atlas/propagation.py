"""Path-loss models and received-power arithmetic.

Three mean path-loss models are built in:

* ``FSPL``: free-space loss, ``20 log10(4 pi d / lambda)``.
* ``LogDistance``: ``PL0 + 10 n log10(d / d0)``, defined only for ``d >= d0``.
* ``TwoSlope``: free space up to ``d0``, log-distance with exponent ``n`` beyond.

``PL0`` defaults to the free-space loss at ``d0``. Log-normal shadowing is
added by the caller through an explicit unit-normal draw so that stochastic
runs are reproducible from a single seed.

All powers are handled in dBm; dBW only appears at I/O boundaries through
:func:`dbw_to_dbm` / :func:`dbm_to_dbw`.

The functions accept scalars or numpy arrays.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0  # m/s, exact


# losses this close below PL0 are rounding noise and map to d0
LOSS_ROUNDING_DB = 1e-9


class PropagationDomainError(ValueError):
    """Raised when a model is evaluated outside its domain of validity."""


class PathLossModel(str, enum.Enum):
    FSPL = "FSPL"
    LOG_DISTANCE = "LogDistance"
    TWO_SLOPE = "TwoSlope"


def dbw_to_dbm(p_dbw):
    return p_dbw + 30.0


def dbm_to_dbw(p_dbm):
    return p_dbm - 30.0


def wavelength(f_mhz: float) -> float:
    """Wavelength in meters for a frequency in MHz."""
    if not f_mhz > 0:
        raise PropagationDomainError(f"frequency must be positive, got {f_mhz} MHz")
    return SPEED_OF_LIGHT / (f_mhz * 1e6)


def fspl(d_m, f_mhz: float):
    """Free-space path loss in dB at distance ``d_m`` (meters)."""
    lam = wavelength(f_mhz)
    d = np.asarray(d_m, dtype=float)
    if np.any(~(d > 0)):
        raise PropagationDomainError("free-space path loss needs d > 0")
    out = 20.0 * np.log10(4.0 * math.pi * d / lam)
    return float(out) if out.ndim == 0 else out


def fspl_distance(pl_db, f_mhz: float):
    """Distance at which the free-space loss equals ``pl_db``."""
    lam = wavelength(f_mhz)
    out = lam / (4.0 * math.pi) * np.power(10.0, np.asarray(pl_db, dtype=float) / 20.0)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class PropagationParams:
    """Mean path-loss model plus shadowing deviation.

    ``pl0`` is optional; when omitted it resolves to the free-space loss at
    ``d0`` for the frequency in use. ``terrain`` holds Longley-Rice style
    inputs (permittivity, refractivity, climate, ...) that are accepted for
    forward compatibility and ignored by every built-in model.
    """

    model: PathLossModel = PathLossModel.FSPL
    d0: float = 1.0
    pl0: float | None = None
    n: float = 2.0
    sigma: float = 0.0
    terrain: dict[str, Any] = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "model", PathLossModel(self.model))
        if self.model is PathLossModel.FSPL:
            if self.n != 2.0:
                raise ValueError("FSPL model fixes the path-loss exponent at n = 2")
        elif not self.d0 > 0:
            raise ValueError(f"reference distance d0 must be > 0, got {self.d0}")
        if not self.n >= 1.0:
            raise ValueError(f"path-loss exponent must be >= 1, got {self.n}")
        if not self.sigma >= 0.0:
            raise ValueError(f"shadowing deviation must be >= 0, got {self.sigma}")

    @classmethod
    def fspl(cls) -> PropagationParams:
        return cls(model=PathLossModel.FSPL)

    def reference_loss(self, f_mhz: float) -> float:
        """``PL0``: the explicit value, or free-space loss at ``d0``."""
        if self.pl0 is not None:
            return float(self.pl0)
        return fspl(self.d0, f_mhz)

    def with_sigma(self, sigma: float) -> PropagationParams:
        return replace(self, sigma=sigma)


def mean_path_loss(d_m, p: PropagationParams, f_mhz: float):
    """Distance-dependent mean path loss in dB (no shadowing)."""
    if p.model is PathLossModel.FSPL:
        return fspl(d_m, f_mhz)

    d = np.asarray(d_m, dtype=float)
    pl0 = p.reference_loss(f_mhz)
    if p.model is PathLossModel.LOG_DISTANCE:
        if np.any(d < p.d0):
            raise PropagationDomainError(
                f"log-distance model is undefined below d0 = {p.d0} m; "
                "use the TwoSlope model for near-field coverage"
            )
        out = pl0 + 10.0 * p.n * np.log10(d / p.d0)
    else:
        far = d >= p.d0
        # clip keeps log10 finite on the branch that np.where discards
        log_term = 10.0 * p.n * np.log10(np.maximum(d, p.d0) / p.d0)
        if np.all(far):
            out = pl0 + log_term
        else:
            near = fspl(np.where(far, p.d0, d), f_mhz)
            out = np.where(far, pl0 + log_term, near)
    return float(out) if np.ndim(out) == 0 else out


def shadowed_path_loss(d_m, p: PropagationParams, f_mhz: float, draw):
    """Mean path loss plus ``sigma * draw`` (``draw`` is unit-normal)."""
    mean = mean_path_loss(d_m, p, f_mhz)
    if p.sigma == 0.0:
        return mean
    out = mean + p.sigma * np.asarray(draw, dtype=float)
    return float(out) if np.ndim(out) == 0 else out


def distance_for_loss(pl_db: float, p: PropagationParams, f_mhz: float) -> float:
    """Invert :func:`mean_path_loss`: the distance at which the mean loss is ``pl_db``.

    Raises :class:`PropagationDomainError` for the log-distance model when the
    loss is below ``PL0`` (the distance would fall inside ``d0``).
    """
    if p.model is PathLossModel.FSPL:
        return fspl_distance(pl_db, f_mhz)
    pl0 = p.reference_loss(f_mhz)
    if pl_db >= pl0 - LOSS_ROUNDING_DB:
        return p.d0 * 10.0 ** ((pl_db - pl0) / (10.0 * p.n))
    if p.model is PathLossModel.TWO_SLOPE:
        return fspl_distance(pl_db, f_mhz)
    raise PropagationDomainError(
        f"loss {pl_db:.2f} dB is below PL0 = {pl0:.2f} dB; distance would be inside d0"
    )


def received_power(pt_dbm, pl_db):
    """Received power in dBm for a transmitted level and a path loss."""
    return pt_dbm - pl_db
