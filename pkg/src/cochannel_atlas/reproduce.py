"""Headline numbers recomputed from scratch and compared with reference values."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import analytic, ccpr_db, cir_analyzer, gapfiller, gridsim, link_budget, measurement, scenarios
from .ccpr_db import CcprKey, Source
from .propagation import PropagationParams


@dataclass(frozen=True)
class Check:
    name: str
    computed: float | str
    expected: float | str
    tolerance: float | None
    unit: str
    status: str  # "pass", "fail" or "info"
    modules: frozenset[str] = field(default_factory=frozenset)

    @property
    def passed(self) -> bool:
        return self.status != "fail"

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "computed": self.computed,
            "expected": self.expected,
            "tolerance": self.tolerance,
            "unit": self.unit,
            "status": self.status,
        }

    def line(self) -> str:
        def fmt(v):
            return f"{v:.6g}" if isinstance(v, float) else str(v)

        tol = f" ±{self.tolerance:g}" if self.tolerance is not None else ""
        unit = f" {self.unit}" if self.unit else ""
        return (f"[{self.status.upper():4}] {self.name}: computed {fmt(self.computed)}{unit}, "
                f"expected {fmt(self.expected)}{unit}{tol}")


def _approx(name, computed, expected, tol, unit, modules) -> Check:
    ok = abs(computed - expected) <= tol
    return Check(name, computed, expected, tol, unit, "pass" if ok else "fail", frozenset(modules))


def _truth(name, computed, expected, ok, unit, modules) -> Check:
    return Check(name, computed, expected, None, unit, "pass" if ok else "fail", frozenset(modules))


def run(ccpr_source: Source | str = Source.M2, threads: int | None = 1) -> list[Check]:
    source = ccpr_db.parse_source(ccpr_source)
    checks: list[Check] = []
    fspl = PropagationParams.fspl()
    geo = ("analytic", "propagation")

    no_ccpr = analytic.AttackGeometry(30.0, -50.0, 0.0, 0.0, fspl, 500.0)
    d_naive = analytic.max_attack_radius(no_ccpr)
    checks.append(_approx("attack range without CCPR", d_naive, 477.0, 1.0, "m", geo))
    checks.append(_approx("area without CCPR", analytic.controlled_area(d_naive) / 1e6, 0.7, 0.05, "km2", geo))

    mode = CcprKey("DVB-T", "16QAM", "2/3", "Gaussian", source)
    alpha = ccpr_db.lookup(mode)
    if alpha is None:
        checks.append(Check(f"CCPR 16-QAM 2/3 ({source.value})", "absent", "value", None, "dB", "fail",
                            frozenset({"ccpr_db"})))
    else:
        g = analytic.AttackGeometry(30.0, -50.0, alpha, alpha, fspl, 500.0)
        d = analytic.max_attack_radius(g)
        area = analytic.controlled_area(d) / 1e6
        mods = geo + ("ccpr_db",)
        if source is Source.M2:
            checks.append(_approx("CCPR 16-QAM 2/3 Gaussian", alpha, 10.0, 0.0, "dB", ["ccpr_db"]))
            checks.append(_approx("attack range with CCPR", d, 151.0, 1.0, "m", mods))
            checks.append(_approx("controlled area with CCPR", area, 0.0716, 0.001, "km2", mods))
            checks.append(_truth("range below a third of the naive range", d / d_naive, "< 1/3",
                                 d / d_naive < 1 / 3, "", mods))
        else:
            checks.append(Check(f"CCPR 16-QAM 2/3 Gaussian ({source.value})", alpha, "-", None, "dB", "info",
                                frozenset({"ccpr_db"})))
            checks.append(Check(f"attack range with {source.value} CCPR", d, 151.0, None, "m", "info",
                                frozenset(mods)))
            checks.append(Check(f"controlled area with {source.value} CCPR", area, 0.0716, None, "km2", "info",
                                frozenset(mods)))
        back = analytic.required_power(d, g)
        checks.append(_approx("required power round trip", back, 30.0, 0.05, "dBm", geo))

    checks.append(_approx("mush multiple, 16-QAM 2/3 both sides, n=2",
                          analytic.mush_multiple(10.0, 10.0, 2.0), 99.0, 1e-9, "x", ["analytic"]))
    m7 = analytic.mush_multiple(2.5, 10.0, 2.0)
    checks.append(_truth("mush multiple, QPSK 1/2 rogue vs 16-QAM 2/3", m7, "> 16", m7 > 16.0, "x", ["analytic"]))

    pn = link_budget.noise_power(7.0, link_budget.DEFAULT_NOISE_BANDWIDTH_HZ)
    checks.append(_approx("receiver noise power", pn, -128.16, 0.01, "dBW", ["link_budget"]))
    for label, key, expected in (
        ("64-QAM Rice", CcprKey("DVB-T", "64QAM", "2/3", "Ricean", "M1"), -82.66),
        ("16-QAM Rayleigh", CcprKey("DVB-T", "16QAM", "2/3", "Rayleigh", "M1"), -85.46),
        ("QPSK Rice", CcprKey("DVB-T", "QPSK", "2/3", "Ricean", "M1"), -93.36),
        ("QPSK Rayleigh", CcprKey("DVB-T", "QPSK", "2/3", "Rayleigh", "M1"), -91.06),
    ):
        ps = link_budget.min_input_power(7.0, link_budget.DEFAULT_NOISE_BANDWIDTH_HZ, ccpr_db.require(key))
        checks.append(_approx(f"minimum input power, {label}", ps, expected, 0.01, "dBm",
                              ["link_budget", "ccpr_db"]))

    gf = gapfiller.evaluate(gapfiller.GapFillerSpec(), scenarios.REFERENCE_GAPFILLER_INPUT)
    checks.append(_approx("gap-filler input margin", gf.margin_db, 19.6, 1e-9, "dB", ["gapfiller"]))
    checks.append(_truth("gap-filler verdict", gf.verdict.value, "Success",
                         gf.verdict is gapfiller.Verdict.SUCCESS, "", ["gapfiller", "ccpr_db"]))

    run_ = measurement.run_measurement(measurement.ReceiverModel(10.0), measurement.MeasurementConfig(step=1.0))
    est = run_.estimate_db
    checks.append(_truth("simulated CCPR measurement (truth 10 dB, 1 dB steps)", est, "[10, 11)",
                         est is not None and 10.0 <= est < 11.0, "dB", ["measurement"]))

    rec = cir_analyzer.ImpulseResponseRecord(52.5, 13.27, (
        cir_analyzer.SignalPath(0.0, -21.0, "Alexanderplatz"),
        cir_analyzer.SignalPath(30.0, -35.0, "Schäferberg"),
        cir_analyzer.SignalPath(2.0, 0.0, "Alexanderplatz-echo"),
        cir_analyzer.SignalPath(32.0, -18.0, "Schäferberg-echo"),
    ))
    g8 = ccpr_db.require(CcprKey("DVB-T2", "G8", None, "Gaussian", "M1"))
    cls = cir_analyzer.classify_point(rec, cir_analyzer.assign_paths(rec, cir_analyzer.LabelMatch()), g8, g8)
    checks.append(_truth("impulse-response point near the gap filler", cls.value, "controlled",
                         cls is cir_analyzer.PointClass.CONTROLLED, "", ["cir_analyzer", "analytic"]))

    disc = gridsim.simulate(scenarios.oracle_disc(cells_per_radius=20), threads=threads)
    counts = gridsim.statistics(disc).counts
    rogue = counts[gridsim.CellClass.ROGUE]
    affected = rogue + counts[gridsim.CellClass.MUSH_ROGUE_STRONGER] + counts[gridsim.CellClass.MUSH_REGULAR_STRONGER]
    frac = rogue / affected
    checks.append(_truth("grid rogue/affected area fraction", frac, "0.01 ±10%",
                         math.isclose(frac, 0.01, rel_tol=0.10), "", ["gridsim", "analytic"]))
    return checks


def modules_covered(checks: list[Check]) -> set[str]:
    out: set[str] = set()
    for c in checks:
        out |= c.modules
    return out
