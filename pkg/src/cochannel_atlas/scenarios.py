"""Built-in scenarios: the closed-form oracle disc, terrain-free versions of the
fixed-reception attack cases, and the gap-filler interference case.

Terrain-free presets cannot reproduce location percentages computed over real
orography; they keep the reference transmitter parameters (ERP, antennas,
frequency, modes, receiver threshold) and substitute a two-slope path-loss
model with log-normal shadowing.
"""
from __future__ import annotations

import math

from . import analytic, link_budget
from .ccpr_db import CcprKey
from .gapfiller import GapFillerAttackInput
from .gridsim import Directive, Grid, Omni, Scenario, Transmitter
from .propagation import PathLossModel, PropagationParams

FREQUENCY_MHZ = 700.0
REGULAR_ERP_DBM = 62.6
SHADOWING_DB = 5.5
FIXED_MODE = CcprKey("DVB-T", "64QAM", "2/3", "Ricean", "M1")

# broadcaster mast far from the area of interest: about -69 dBm at its center
REGULAR_DISTANCE_M = 20_000.0
AREA_WIDTH_M = 11_000.0
AREA_HEIGHT_M = 15_000.0

# gap-filler input levels (broadcaster at attacker, at gap filler; attacker at gap filler)
REFERENCE_GAPFILLER_INPUT = GapFillerAttackInput(p_rbv=-58.4, p_rav=-38.8, p_rba=-69.6)

ATTACKER_CASES = {
    # name: (rogue ERP dBm, antenna, rogue path-loss exponent)
    "rooftop-directive": (40.0, Directive(bearing=270.0, beamwidth=60.0, front_to_back=20.0), 4.0),
    "rooftop-omni": (29.0, Omni(), 4.0),
    "street-omni": (29.0, Omni(), 4.35),
}


def oracle_disc(
    alpha_rogue: float = 10.0,
    alpha_reg: float = 10.0,
    pt_rogue: float = 30.0,
    pr_reg: float = -50.0,
    f_mhz: float = 500.0,
    cells_per_radius: int = 50,
    margin: float = 1.05,
) -> Scenario:
    """Free-space, no shadowing, constant regular level: the closed-form geometry on a grid.

    The grid covers the whole affected disc; resolution is the attack radius
    divided by ``cells_per_radius``.
    """
    g = analytic.AttackGeometry(pt_rogue, pr_reg, alpha_rogue, alpha_reg, PropagationParams.fspl(), f_mhz)
    d_rogue = analytic.max_attack_radius(g)
    half = analytic.affected_radius(g) * margin
    return Scenario(
        transmitters=(
            Transmitter("regular", "regular", 10 * half, 0.0, 60.0),
            Transmitter("rogue", "rogue", 0.0, 0.0, pt_rogue),
        ),
        frequency=f_mhz,
        propagation=PropagationParams.fspl(),
        grid=Grid.centered(0.0, 0.0, half, d_rogue / cells_per_radius),
        alpha_reg=alpha_reg,
        alpha_rogue=alpha_rogue,
        constant_pr_reg=pr_reg,
    )


def regular_propagation(sigma: float = SHADOWING_DB) -> PropagationParams:
    return PropagationParams(PathLossModel.TWO_SLOPE, d0=100.0, n=2.7, sigma=sigma)


def fixed_reception(
    case: str = "rooftop-omni",
    rogue_mode: CcprKey = FIXED_MODE,
    resolution: float = 10.0,
    seed: int = 1,
    sigma: float = SHADOWING_DB,
) -> Scenario:
    """Attack on rooftop receivers at the fringe of the service area."""
    try:
        erp, antenna, n_rogue = ATTACKER_CASES[case]
    except KeyError:
        raise ValueError(f"unknown case {case!r}; choose from {sorted(ATTACKER_CASES)}") from None
    reg = regular_propagation(sigma)
    rogue = PropagationParams(PathLossModel.TWO_SLOPE, d0=100.0, n=n_rogue, sigma=sigma)
    noise = link_budget.min_input_power(link_budget.DEFAULT_NOISE_FIGURE_DB, link_budget.DEFAULT_NOISE_BANDWIDTH_HZ, 15.5)
    return Scenario(
        transmitters=(
            Transmitter("broadcaster", "regular", -REGULAR_DISTANCE_M, 0.0, REGULAR_ERP_DBM,
                        mode=FIXED_MODE, height_tag="100 m agl", propagation=reg),
            Transmitter("attacker", "rogue", 0.0, 0.0, erp, antenna=antenna, mode=rogue_mode,
                        height_tag=case.split("-")[0], propagation=rogue),
        ),
        frequency=FREQUENCY_MHZ,
        propagation=reg,
        grid=Grid(-AREA_WIDTH_M / 2, -AREA_HEIGHT_M / 2, AREA_WIDTH_M, AREA_HEIGHT_M, resolution),
        noise_floor=noise,
        seed=seed,
    )


def gapfiller_interference(resolution: float = 10.0, seed: int = 1, sigma: float = SHADOWING_DB) -> Scenario:
    """Attacker 30 m from the gap filler, yagi aimed at it; end users evaluated
    at the repeater's input frequency."""
    scen = fixed_reception("rooftop-directive", resolution=resolution, seed=seed, sigma=sigma)
    gap_x, gap_y = 30.0, 0.0
    bearing = math.degrees(math.atan2(gap_x, gap_y))
    attacker = Transmitter(
        "attacker", "rogue", 0.0, 0.0, 40.0,
        antenna=Directive(bearing=bearing, beamwidth=60.0, front_to_back=20.0),
        mode=FIXED_MODE, height_tag="rooftop", propagation=scen.rogue.propagation,
    )
    return Scenario(
        transmitters=(scen.regular, attacker),
        frequency=scen.frequency,
        propagation=scen.propagation,
        grid=scen.grid,
        noise_floor=scen.noise_floor,
        seed=seed,
    )
