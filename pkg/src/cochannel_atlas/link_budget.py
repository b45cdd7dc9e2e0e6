"""Receiver noise power and minimum receiver input power.

Standard DTV planning arithmetic::

    Pn     = F + 10 log10(k T0 B)          [dBW]
    Ps_min = Pn + C/N                      [dBW]  -> reported in dBm

The default noise bandwidth of 7.61 MHz is the DVB-T 8 MHz channel value; it
reproduces Pn = -128.16 dBW at F = 7 dB.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .propagation import dbw_to_dbm

BOLTZMANN = 1.380649e-23  # J/K, exact SI value
T0_KELVIN = 290.0
DEFAULT_NOISE_BANDWIDTH_HZ = 7.61e6
DEFAULT_NOISE_FIGURE_DB = 7.0


def noise_power(noise_figure_db: float, bandwidth_hz: float = DEFAULT_NOISE_BANDWIDTH_HZ) -> float:
    """Receiver noise input power in dBW."""
    if not bandwidth_hz > 0:
        raise ValueError(f"bandwidth must be positive, got {bandwidth_hz} Hz")
    return noise_figure_db + 10.0 * math.log10(BOLTZMANN * T0_KELVIN * bandwidth_hz)


def min_input_power(noise_figure_db: float, bandwidth_hz: float, cn_db: float) -> float:
    """Minimum receiver input power in dBm for a required C/N."""
    return dbw_to_dbm(noise_power(noise_figure_db, bandwidth_hz) + cn_db)


@dataclass(frozen=True)
class LinkBudget:
    noise_figure_f: float = DEFAULT_NOISE_FIGURE_DB
    bandwidth_b: float = DEFAULT_NOISE_BANDWIDTH_HZ
    required_cn: float = 0.0

    @property
    def noise_power_pn(self) -> float:
        """dBW"""
        return noise_power(self.noise_figure_f, self.bandwidth_b)

    @property
    def min_input_ps(self) -> float:
        """dBm"""
        return min_input_power(self.noise_figure_f, self.bandwidth_b, self.required_cn)
