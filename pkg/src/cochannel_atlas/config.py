"""JSON configuration: strict validation and conversion to a Scenario."""
from __future__ import annotations

import json
import math
import os
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema

from . import ccpr_db, link_budget
from .ccpr_db import CcprKey, Source
from .gridsim import DEFAULT_MAX_CELLS, Directive, Grid, Omni, Scenario, Transmitter
from .propagation import PropagationParams


class ConfigError(ValueError):
    pass


def schema() -> dict:
    text = resources.files("cochannel_atlas").joinpath("schema/config.json").read_text()
    return json.loads(text)


def validate(cfg: dict) -> dict:
    try:
        jsonschema.validate(cfg, schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config {where}: {exc.message} (see schema/config.json)") from None
    return cfg


def load(path: str | os.PathLike) -> dict:
    try:
        cfg = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from None
    return validate(cfg)


def propagation_from(obj: dict | None) -> PropagationParams:
    obj = obj or {}
    return PropagationParams(
        model=obj.get("model", "FSPL"),
        d0=obj.get("d0_m", 1.0),
        pl0=obj.get("pl0_db"),
        n=obj.get("n", 2.0),
        sigma=obj.get("sigma_db", 0.0),
        terrain=obj.get("terrain", {}),
    )


def _antenna(obj: dict | None):
    if not obj or obj["type"] == "omni":
        return Omni()
    return Directive(obj["bearing_deg"], obj["beamwidth_deg"], obj["front_to_back_db"])


def _mode(obj: Any, source: str | None) -> CcprKey | None:
    if obj is None:
        return None
    key = CcprKey.from_obj(obj)
    return key.with_(source=source) if source else key


def noise_floor_from(cfg: dict, regular_mode: CcprKey | None) -> float:
    """Explicit ``scenario.noise_floor_dbm``, else the link-budget minimum input
    power, else no floor."""
    scen = cfg["scenario"]
    if scen.get("noise_floor_dbm") is not None:
        return float(scen["noise_floor_dbm"])
    lb = cfg.get("linkbudget")
    if lb is None:
        return -math.inf
    cn = lb.get("cn_db")
    if cn is None:
        if regular_mode is None:
            raise ConfigError("linkbudget.cn_db missing and the regular transmitter has no mode")
        cn = ccpr_db.require(regular_mode.with_(source=Source.M1))
    return link_budget.min_input_power(
        lb.get("noise_figure_db", link_budget.DEFAULT_NOISE_FIGURE_DB),
        lb.get("bandwidth_hz", link_budget.DEFAULT_NOISE_BANDWIDTH_HZ),
        cn,
    )


def scenario_from(cfg: dict) -> Scenario:
    if "scenario" not in cfg:
        raise ConfigError("config has no 'scenario' section")
    scen = cfg["scenario"]
    ccpr = cfg.get("ccpr", {})
    source = ccpr.get("source")
    txs = []
    for t in scen["transmitters"]:
        txs.append(Transmitter(
            id=t["id"],
            role=t["role"],
            x=t["x_m"],
            y=t["y_m"],
            erp=t["erp_dbm"],
            antenna=_antenna(t.get("antenna")),
            mode=_mode(t.get("mode"), source),
            height_tag=t.get("height_tag", ""),
            propagation=propagation_from(t["propagation"]) if "propagation" in t else None,
        ))
    regular = next((t for t in txs if t.role.value == "regular"), None)
    g = scen["grid"]
    try:
        return Scenario(
            transmitters=tuple(txs),
            frequency=scen["frequency_mhz"],
            propagation=propagation_from(cfg.get("propagation")),
            grid=Grid(g["x0_m"], g["y0_m"], g["width_m"], g["height_m"], g["resolution_m"]),
            alpha_reg=ccpr.get("alpha_reg_db"),
            alpha_rogue=ccpr.get("alpha_rogue_db"),
            noise_floor=noise_floor_from(cfg, regular.mode if regular else None),
            seed=scen.get("seed", 0),
            constant_pr_reg=scen.get("constant_pr_reg_dbm"),
            variability=scen.get("variability", "random"),
            location_probability=scen.get("location_probability", 0.95),
            max_cells=scen.get("max_cells", DEFAULT_MAX_CELLS),
        )
    except ccpr_db.NoEntryError as exc:
        raise ConfigError(str(exc)) from None


def scenario_to_config(s: Scenario) -> dict:
    """Inverse of :func:`scenario_from` for scenarios built in code."""

    def prop(p: PropagationParams) -> dict:
        out = {"model": p.model.value, "d0_m": p.d0, "n": p.n, "sigma_db": p.sigma}
        if p.pl0 is not None:
            out["pl0_db"] = p.pl0
        return out

    def tx(t: Transmitter) -> dict:
        out = {"id": t.id, "role": t.role.value, "x_m": t.x, "y_m": t.y, "erp_dbm": t.erp}
        if isinstance(t.antenna, Directive):
            out["antenna"] = {"type": "directive", "bearing_deg": t.antenna.bearing,
                              "beamwidth_deg": t.antenna.beamwidth, "front_to_back_db": t.antenna.front_to_back}
        else:
            out["antenna"] = {"type": "omni"}
        if t.mode is not None:
            out["mode"] = str(t.mode)
        if t.height_tag:
            out["height_tag"] = t.height_tag
        if t.propagation is not None:
            out["propagation"] = prop(t.propagation)
        return out

    g = s.grid
    scen = {
        "frequency_mhz": s.frequency,
        "transmitters": [tx(t) for t in s.transmitters],
        "grid": {"x0_m": g.x0, "y0_m": g.y0, "width_m": g.width, "height_m": g.height, "resolution_m": g.resolution},
        "seed": s.seed,
        "noise_floor_dbm": None if s.noise_floor == -math.inf else s.noise_floor,
        "constant_pr_reg_dbm": s.constant_pr_reg,
        "variability": s.variability.value,
        "location_probability": s.location_probability,
    }
    return validate({
        "scenario": scen,
        "propagation": prop(s.propagation),
        "ccpr": {"alpha_reg_db": s.alpha_reg, "alpha_rogue_db": s.alpha_rogue},
    })

