"""Command-line entry point.

Exit codes: 0 success, 1 runtime failure, 2 bad input (usage, config, domain).
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

from . import (
    analytic,
    ccpr_db,
    cir_analyzer,
    config,
    gapfiller,
    gridsim,
    link_budget,
    measurement,
    reproduce,
)
from .ccpr_db import CcprKey
from .propagation import PathLossModel, PropagationParams

EXIT_OK, EXIT_RUNTIME, EXIT_INPUT = 0, 1, 2


class InputError(ValueError):
    pass


def _propagation(args) -> PropagationParams:
    model = PathLossModel(args.model)
    if model is PathLossModel.FSPL:
        if args.n != 2.0:
            raise InputError("--model FSPL requires --n 2")
        return PropagationParams.fspl()
    return PropagationParams(model, d0=args.d0, pl0=args.pl0, n=args.n)


def _add_propagation_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--f", type=float, required=True, help="frequency (MHz)")
    p.add_argument("--n", type=float, default=2.0, help="path-loss exponent (default 2)")
    p.add_argument("--d0", type=float, default=1.0, help="reference distance (m, default 1)")
    p.add_argument("--pl0", type=float, default=None, help="reference loss (dB, default FSPL at d0)")
    p.add_argument("--model", choices=[m.value for m in PathLossModel], default=PathLossModel.TWO_SLOPE.value)


def cmd_range(args) -> int:
    g = analytic.AttackGeometry(args.pt, args.pr_reg, args.alpha, 0.0, _propagation(args), args.f)
    d = analytic.max_attack_radius(g)
    area_km2 = analytic.controlled_area(d) / 1e6
    if args.csv:
        print(f"{d:.6f},{area_km2:.6f}")
    else:
        print(f"{d:.0f} m")
        if args.verbose:
            print(f"a_rogue = {area_km2:.4f} km2")
    return EXIT_OK


def cmd_power(args) -> int:
    g = analytic.AttackGeometry(math.inf, args.pr_reg, args.alpha, 0.0, _propagation(args), args.f)
    pt = analytic.required_power(args.d, g)
    print(f"{pt:.6f}" if args.csv else f"{pt:.2f} dBm")
    return EXIT_OK


def cmd_mush_ratio(args) -> int:
    frac = analytic.area_fraction(args.alpha_rogue, args.alpha_reg, args.n)
    multiple = analytic.mush_multiple(args.alpha_rogue, args.alpha_reg, args.n)
    if args.csv:
        print(f"{frac:.10g},{multiple:.10g}")
    else:
        print(f"controlled_fraction={frac:.6g} mush_multiple={multiple:.1f}")
    return EXIT_OK


def cmd_linkbudget(args) -> int:
    section = config.load(args.config).get("linkbudget", {}) if args.config else {}
    f = args.noise_figure if args.noise_figure is not None else section.get("noise_figure_db", link_budget.DEFAULT_NOISE_FIGURE_DB)
    b = args.bandwidth if args.bandwidth is not None else section.get("bandwidth_hz", link_budget.DEFAULT_NOISE_BANDWIDTH_HZ)
    cn = args.cn if args.cn is not None else section.get("cn_db")
    if cn is None and args.mode:
        cn = ccpr_db.require(CcprKey.parse(args.mode).with_(source="M1"))
    if cn is None:
        raise InputError("required C/N missing: pass --cn, --mode, or linkbudget.cn_db in --config")
    pn = link_budget.noise_power(f, b)
    ps = link_budget.min_input_power(f, b, cn)
    if args.json:
        print(json.dumps({"noise_figure_db": f, "bandwidth_hz": b, "cn_db": cn, "pn_dbw": pn, "ps_min_dbm": ps}))
    else:
        print(f"Pn     = {pn:.2f} dBW")
        print(f"Ps_min = {ps:.2f} dBm")
    return EXIT_OK


def cmd_export_ccpr(args) -> int:
    text = ccpr_db.to_csv()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _simulate_config(args) -> dict:
    cfg = config.load(args.config)
    scen = cfg.setdefault("scenario", {})
    if args.seed is not None:
        scen["seed"] = args.seed
    if args.resolution is not None:
        scen.setdefault("grid", {})["resolution_m"] = args.resolution
    if args.noise_floor is not None:
        scen["noise_floor_dbm"] = args.noise_floor
    if args.sigma is not None:
        cfg.setdefault("propagation", {})["sigma_db"] = args.sigma
        for tx in scen.get("transmitters", []):
            if "propagation" in tx:
                tx["propagation"]["sigma_db"] = args.sigma
    out = cfg.setdefault("output", {})
    for key in ("raster", "format", "stats", "threads"):
        if getattr(args, key) is not None:
            out[key] = getattr(args, key)
    return config.validate(cfg)


def cmd_simulate(args) -> int:
    cfg = _simulate_config(args)
    scen = config.scenario_from(cfg)
    out = cfg.get("output", {})
    m = gridsim.simulate(scen, threads=gridsim.resolve_threads(out.get("threads")))
    stats = gridsim.statistics(m)
    if out.get("raster"):
        gridsim.write_raster(m, out["raster"], out.get("format", "pgm"))
    if out.get("stats"):
        gridsim.write_stats(stats, out["stats"])
    else:
        sys.stdout.write(gridsim.stats_json(stats))
    return EXIT_OK


def cmd_gapfiller(args) -> int:
    mode = CcprKey.parse(args.mode)
    spec = gapfiller.GapFillerSpec(args.input_min, args.input_max, args.rx_gain, args.output_erp, mode)
    alpha = args.alpha
    if alpha is None:
        alpha = gapfiller.capture_threshold(mode, use_ccpr=args.use_ccpr, ccpr_source=ccpr_db.parse_source(args.ccpr_source))
    result = gapfiller.evaluate(spec, gapfiller.GapFillerAttackInput(args.p_rbv, args.p_rav, args.p_rba), alpha)
    print(json.dumps(result.to_dict()))
    return EXIT_OK


def cmd_measure_sim(args) -> int:
    rx = measurement.ReceiverModel(args.true_ccpr, args.acquire_ticks, args.hysteresis, args.ccpr_regular)
    cfg = measurement.MeasurementConfig(
        p_fixed=args.p_fixed, start_margin=args.start_margin, step=args.step, dwell_ticks=args.dwell_ticks,
    )
    runs = [measurement.run_measurement(rx, cfg) for _ in range(args.repeats)]
    summary = measurement.RepeatSummary(tuple(r.estimate_db for r in runs))
    if args.trace:
        with open(args.trace, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["step_index", "p_rogue_dbm", "ratio_db", "state"])
            for t in runs[0].trace:
                w.writerow([t.index, f"{t.p_rogue:.6f}", f"{t.ratio_db:.6f}", t.state.value])
    if args.json:
        print(json.dumps({
            "estimate_min_db": summary.min, "estimate_median_db": summary.median,
            "estimate_max_db": summary.max, "repeats": args.repeats,
            "mush_width_db": measurement.mush_width(runs[0]),
        }))
    else:
        print(f"estimated CCPR = {summary.median:.2f} dB "
              f"(min {summary.min:.2f} dB, max {summary.max:.2f} dB, {args.repeats} runs)")
    return EXIT_OK


def cmd_cir_classify(args) -> int:
    records = cir_analyzer.load_ndjson(args.input)
    if args.policy == "label":
        policy = cir_analyzer.LabelMatch(args.original_label, args.echo_label)
    else:
        policy = cir_analyzer.DelayWindow(args.expected_delay, args.window)
    if args.ccpr_source:
        records = [
            r if r.mode is None else cir_analyzer.ImpulseResponseRecord(
                r.lat, r.lon, r.paths, r.mode.with_(source=args.ccpr_source))
            for r in records
        ]
    points = cir_analyzer.classify_records(records, args.alpha_rogue, args.alpha_reg, policy)
    cir_analyzer.emit_geojson(points, args.out)
    counts = {c.value: 0 for c in cir_analyzer.PointClass}
    for p in points:
        counts[p.point_class.value] += 1
    print(" ".join(f"{k}={v}" for k, v in counts.items()))
    return EXIT_OK


def cmd_reproduce(args) -> int:
    checks = reproduce.run(args.ccpr_source, threads=args.threads)
    if args.json:
        print(json.dumps({
            "ccpr_source": ccpr_db.parse_source(args.ccpr_source).value,
            "all_passed": all(c.passed for c in checks),
            "modules": sorted(reproduce.modules_covered(checks) | {"cli"}),
            "checks": [c.to_dict() for c in checks],
        }, indent=2))
    else:
        for c in checks:
            print(c.line())
        failed = sum(not c.passed for c in checks)
        print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return EXIT_OK if all(c.passed for c in checks) else EXIT_RUNTIME


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cochannel-atlas", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("range", help="maximum attack radius")
    p.add_argument("--pt", type=float, required=True, help="rogue transmitter power (dBm)")
    p.add_argument("--pr-reg", type=float, required=True, help="regular received level (dBm)")
    p.add_argument("--alpha", type=float, default=0.0, help="rogue CCPR (dB)")
    _add_propagation_flags(p)
    p.add_argument("--csv", action="store_true", help="single-line CSV: d_rogue_m,a_rogue_km2")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_range)

    p = sub.add_parser("power", help="rogue power needed for a given radius")
    p.add_argument("--d", type=float, required=True, help="attack radius (m)")
    p.add_argument("--pr-reg", type=float, required=True)
    p.add_argument("--alpha", type=float, default=0.0)
    _add_propagation_flags(p)
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_power)

    p = sub.add_parser("mush-ratio", help="controlled fraction of the affected area")
    p.add_argument("--alpha-rogue", type=float, required=True)
    p.add_argument("--alpha-reg", type=float, required=True)
    p.add_argument("--n", type=float, default=2.0)
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_mush_ratio)

    p = sub.add_parser("linkbudget", help="noise power and minimum input power")
    p.add_argument("--noise-figure", "-F", type=float, default=None, help="dB (default 7)")
    p.add_argument("--bandwidth", "-B", type=float, default=None, help="Hz (default 7.61e6)")
    p.add_argument("--cn", type=float, default=None, help="required C/N (dB)")
    p.add_argument("--mode", default=None, help="look up C/N (M1) for a mode, e.g. DVB-T:64QAM:2/3:Ricean")
    p.add_argument("--config", default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_linkbudget)

    p = sub.add_parser("export-ccpr", help="write the protection-ratio table as CSV")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_export_ccpr)

    p = sub.add_parser("simulate", help="grid simulation from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--raster", default=None)
    p.add_argument("--format", choices=["pgm", "csv"], default=None)
    p.add_argument("--stats", default=None, help="stats JSON path (default stdout)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--resolution", type=float, default=None, help="m per cell")
    p.add_argument("--sigma", type=float, default=None, help="shadowing deviation (dB)")
    p.add_argument("--noise-floor", type=float, default=None, help="dBm")
    p.add_argument("--threads", type=int, default=None, help="0 = all cores")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("gapfiller", help="gap-filler capture verdict")
    p.add_argument("--p-rbv", type=float, required=True, help="broadcaster at gap-filler input (dBm)")
    p.add_argument("--p-rav", type=float, required=True, help="attacker at gap-filler input (dBm)")
    p.add_argument("--p-rba", type=float, default=None, help="broadcaster at attacker (dBm, informational)")
    p.add_argument("--input-min", type=float, default=-77.0)
    p.add_argument("--input-max", type=float, default=-7.0)
    p.add_argument("--rx-gain", type=float, default=11.0, help="receive antenna gain (dBd)")
    p.add_argument("--output-erp", type=float, default=42.0)
    p.add_argument("--mode", default="DVB-T:64QAM:2/3:Ricean:M1")
    p.add_argument("--alpha", type=float, default=None, help="capture threshold (dB), overrides --mode")
    p.add_argument("--use-ccpr", action="store_true", help="use the Gaussian CCPR instead of the mode's C/N")
    p.add_argument("--ccpr-source", default="M2")
    p.set_defaults(func=cmd_gapfiller)

    p = sub.add_parser("measure-sim", help="simulated automated CCPR measurement")
    p.add_argument("--true-ccpr", type=float, required=True)
    p.add_argument("--ccpr-regular", type=float, default=None)
    p.add_argument("--step", type=float, default=1.0)
    p.add_argument("--dwell-ticks", type=int, default=10)
    p.add_argument("--acquire-ticks", type=int, default=1)
    p.add_argument("--hysteresis", type=float, default=0.0)
    p.add_argument("--p-fixed", type=float, default=-60.0)
    p.add_argument("--start-margin", type=float, default=None, help="default: 2 x true CCPR + 10 dB")
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--trace", default=None, help="CSV trace of the first run")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_measure_sim)

    p = sub.add_parser("cir-classify", help="classify impulse-response records to GeoJSON")
    p.add_argument("--input", required=True, help="NDJSON records")
    p.add_argument("--out", required=True, help="GeoJSON output")
    p.add_argument("--alpha-rogue", type=float, default=None, help="default: record mode's table value")
    p.add_argument("--alpha-reg", type=float, default=None)
    p.add_argument("--ccpr-source", default=None, help="override the source of record modes (e.g. DTVP)")
    p.add_argument("--policy", choices=["label", "delay"], default="label")
    p.add_argument("--original-label", default="Alexanderplatz")
    p.add_argument("--echo-label", default=None)
    p.add_argument("--expected-delay", type=float, default=0.0, help="us")
    p.add_argument("--window", type=float, default=math.inf, help="us")
    p.set_defaults(func=cmd_cir_classify)

    p = sub.add_parser("reproduce", help="recompute the headline numbers")
    p.add_argument("--ccpr-source", default="M2")
    p.add_argument("--json", action="store_true")
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "start_margin", 0) is None:
        args.start_margin = 2 * max(args.true_ccpr, args.ccpr_regular or 0.0) + 10.0
    try:
        return args.func(args)
    except (ValueError, LookupError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
