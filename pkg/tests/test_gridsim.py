import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cochannel_atlas import analytic, gridsim, scenarios
from cochannel_atlas.gridsim import CellClass, Directive, Grid, Omni, Scenario, Transmitter, classify
from cochannel_atlas.propagation import PathLossModel, PropagationParams, fspl

FSPL = PropagationParams.fspl()


def two_tx(reg_erp=60.0, rogue_erp=30.0, grid=None, **kw):
    kw.setdefault("alpha_reg", 10.0)
    kw.setdefault("alpha_rogue", 10.0)
    return Scenario(
        transmitters=(
            Transmitter("reg", "regular", 5000.0, 0.0, reg_erp),
            Transmitter("rogue", "rogue", 0.0, 0.0, rogue_erp),
        ),
        frequency=500.0,
        propagation=kw.pop("propagation", FSPL),
        grid=grid or Grid(-500.0, -500.0, 1000.0, 1000.0, 50.0),
        **kw,
    )


# classification ------------------------------------------------------------

@pytest.mark.parametrize("reg,rogue,expected", [
    (-70.0, -60.0, CellClass.ROGUE),  # exactly alpha above: inclusive
    (-70.0, -60.5, CellClass.MUSH_ROGUE_STRONGER),
    (-60.0, -70.0, CellClass.REGULAR),
    (-60.5, -70.0, CellClass.MUSH_REGULAR_STRONGER),
    (-65.0, -65.0, CellClass.MUSH_ROGUE_STRONGER),  # tie goes to the rogue side
    (-100.0, -95.0, CellClass.NO_SERVICE),
])
def test_classify_cases(reg, rogue, expected):
    assert classify(reg, rogue, 10.0, 10.0, noise_floor=-90.0) == expected


def test_classify_zero_alpha_tie_is_rogue():
    assert classify(-60.0, -60.0, 0.0, 0.0) == CellClass.ROGUE


def test_received_but_below_floor_is_not_service():
    # rogue wins the ratio yet is under the floor, regular also under it
    assert classify(-120.0, -95.0, 10.0, 10.0, noise_floor=-90.0) == CellClass.NO_SERVICE
    # regular above floor, rogue beats it by the ratio: rogue
    assert classify(-89.0, -70.0, 10.0, 10.0, noise_floor=-90.0) == CellClass.ROGUE


@given(st.floats(-150, 0), st.floats(-150, 0), st.floats(0, 30), st.floats(0, 30))
def test_classify_is_exhaustive_and_consistent(reg, rogue, a_reg, a_rogue):
    c = CellClass(int(classify(reg, rogue, a_reg, a_rogue)))
    if c is CellClass.ROGUE:
        assert rogue >= reg + a_rogue
    elif c is CellClass.REGULAR:
        assert reg >= rogue + a_reg and not rogue >= reg + a_rogue
    else:
        assert rogue < reg + a_rogue and reg < rogue + a_reg
        assert (c is CellClass.MUSH_ROGUE_STRONGER) == (rogue >= reg)


# antennas ------------------------------------------------------------------

def test_directive_pattern():
    ant = Directive(bearing=90.0, beamwidth=60.0, front_to_back=20.0)
    assert ant.gain(90.0) == 0.0
    assert ant.gain(119.0) == 0.0
    assert ant.gain(270.0) == pytest.approx(-20.0)
    assert ant.gain(125.0) == pytest.approx(-10.0)  # taper midpoint
    assert ant.gain(-270.0) == 0.0  # wraps


@given(st.floats(-720, 720))
def test_directive_gain_bounded(b):
    g = Directive(37.0, 45.0, 25.0).gain(b)
    assert -25.0 - 1e-9 <= g <= 0.0


def test_omni_is_flat():
    assert np.all(Omni().gain(np.linspace(0, 360, 7)) == 0.0)


def test_dbd_to_dbi():
    assert gridsim.dbd_to_dbi(11.0) == pytest.approx(13.15)


# scenario validation -------------------------------------------------------

def test_scenario_needs_one_of_each_role():
    t = Transmitter("a", "regular", 0, 0, 10)
    with pytest.raises(ValueError):
        Scenario((t, t), 500.0, FSPL, Grid(0, 0, 10, 10, 1), alpha_reg=1, alpha_rogue=1)


def test_grid_cap():
    with pytest.raises(gridsim.GridSizeError):
        two_tx(grid=Grid(0, 0, 1000, 1000, 1.0), max_cells=10_000)


def test_alphas_from_modes():
    from cochannel_atlas.ccpr_db import CcprKey

    s = Scenario(
        (Transmitter("r", "regular", 0, 0, 60, mode=CcprKey.parse("DVB-T:16QAM:2/3")),
         Transmitter("x", "rogue", 0, 0, 30, mode=CcprKey.parse("DVB-T:QPSK:1/2"))),
        500.0, FSPL, Grid(0, 0, 10, 10, 1),
    )
    assert (s.alpha_reg, s.alpha_rogue) == (10.0, 2.5)


def test_grid_shape_and_centers():
    g = Grid(0.0, 0.0, 100.0, 50.0, 10.0)
    assert g.shape == (5, 10)
    assert g.x_centers[0] == 5.0 and g.y_centers[-1] == 45.0


# simulation ----------------------------------------------------------------

def test_received_power_matches_link_equation():
    m = gridsim.simulate(two_tx())
    j, i = 3, 7
    d = math.hypot(m.x[i] - 0.0, m.y[j] - 0.0)
    assert m.pr_rogue[j, i] == pytest.approx(30.0 - fspl(d, 500.0), abs=1e-9)
    d_reg = math.hypot(m.x[i] - 5000.0, m.y[j])
    assert m.pr_reg[j, i] == pytest.approx(60.0 - fspl(d_reg, 500.0), abs=1e-9)


def test_transmitter_cell_uses_half_resolution_floor():
    s = two_tx(grid=Grid(-25.0, -25.0, 50.0, 50.0, 50.0))
    m = gridsim.simulate(s)
    assert m.pr_rogue[0, 0] == pytest.approx(30.0 - fspl(25.0, 500.0))


def test_silent_rogue_gives_all_regular():
    m = gridsim.simulate(two_tx(rogue_erp=-math.inf))
    assert np.all(m.classes == CellClass.REGULAR)


def test_oracle_disc_against_closed_form():
    s = scenarios.oracle_disc(cells_per_radius=20)
    m = gridsim.simulate(s)
    g = analytic.AttackGeometry(30.0, -50.0, 10.0, 10.0, FSPL, 500.0)
    d = analytic.max_attack_radius(g)
    assert abs(gridsim.disc_radius(m, [CellClass.ROGUE], (0, 0)) - d) <= s.grid.resolution
    stats = gridsim.statistics(m)
    rogue = stats.counts[CellClass.ROGUE]
    affected = rogue + stats.counts[CellClass.MUSH_ROGUE_STRONGER] + stats.counts[CellClass.MUSH_REGULAR_STRONGER]
    assert rogue / affected == pytest.approx(0.01, rel=0.10)


@pytest.mark.parametrize("a_rogue,a_reg", [(2.5, 10.0), (0.0, 20.0)])
def test_oracle_disc_other_ratios(a_rogue, a_reg):
    s = scenarios.oracle_disc(alpha_rogue=a_rogue, alpha_reg=a_reg, cells_per_radius=20)
    stats = gridsim.statistics(gridsim.simulate(s))
    rogue = stats.counts[CellClass.ROGUE]
    affected = stats.total - stats.counts[CellClass.REGULAR]
    assert rogue / affected == pytest.approx(analytic.area_fraction(a_rogue, a_reg, 2.0), rel=0.10)


def test_seeded_runs_identical_and_thread_independent():
    s = two_tx(propagation=PropagationParams(PathLossModel.TWO_SLOPE, d0=10.0, n=3.0, sigma=6.0), seed=42)
    a = gridsim.simulate(s, threads=1)
    b = gridsim.simulate(s, threads=4)
    assert np.array_equal(a.pr_rogue, b.pr_rogue)
    assert gridsim.pgm_bytes(a) == gridsim.pgm_bytes(b)


def test_different_seeds_differ():
    p = PropagationParams(PathLossModel.TWO_SLOPE, d0=10.0, n=3.0, sigma=6.0)
    a = gridsim.simulate(two_tx(propagation=p, seed=1))
    b = gridsim.simulate(two_tx(propagation=p, seed=2))
    assert not np.array_equal(a.pr_rogue, b.pr_rogue)


def test_margin_mode_shifts_by_quantile():
    p = PropagationParams(PathLossModel.TWO_SLOPE, d0=10.0, n=3.0, sigma=5.5)
    base = gridsim.simulate(two_tx(propagation=p.with_sigma(0.0)))
    m = gridsim.simulate(two_tx(propagation=p, variability="margin", location_probability=0.95))
    # Phi^-1(0.95) = 1.6448536269514722
    assert np.allclose(base.pr_rogue - m.pr_rogue, 1.6448536269514722 * 5.5)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.0, 25.0), st.floats(0.0, 25.0))
def test_raising_rogue_alpha_never_grows_rogue_area(a, extra):
    s1 = two_tx(alpha_rogue=a)
    s2 = two_tx(alpha_rogue=a + extra)
    m1, m2 = gridsim.simulate(s1), gridsim.simulate(s2)
    assert gridsim.statistics(m2).rogue_pct <= gridsim.statistics(m1).rogue_pct


def test_resolve_threads(monkeypatch):
    monkeypatch.setenv("COCHANNEL_ATLAS_THREADS", "3")
    assert gridsim.resolve_threads(None) == 3
    assert gridsim.resolve_threads(2) == 2
    monkeypatch.delenv("COCHANNEL_ATLAS_THREADS")
    assert gridsim.resolve_threads(None) >= 1


# statistics ----------------------------------------------------------------

def test_stats_sum_to_100_and_keys():
    st_ = gridsim.statistics(gridsim.simulate(two_tx()))
    d = st_.to_dict()
    assert set(d) == {"regular_pct", "rogue_pct", "mush_pct", "mush_rogue_stronger_pct",
                      "mush_regular_stronger_pct", "no_service_pct"}
    assert d["regular_pct"] + d["rogue_pct"] + d["mush_pct"] + d["no_service_pct"] == pytest.approx(100.0)
    assert d["mush_pct"] == pytest.approx(d["mush_rogue_stronger_pct"] + d["mush_regular_stronger_pct"])


def test_region_statistics():
    m = gridsim.simulate(two_tx())
    square = [(-100, -100), (100, -100), (100, 100), (-100, 100)]
    st_ = gridsim.statistics(m, square)
    assert st_.total == 16  # 4x4 cells of 50 m
    with pytest.raises(ValueError):
        gridsim.statistics(m, [(1e6, 1e6), (1e6 + 1, 1e6), (1e6, 1e6 + 1)])


# output --------------------------------------------------------------------

def _tiny_map():
    s = two_tx(grid=Grid(0.0, 0.0, 2.0, 2.0, 1.0))
    classes = np.array([[CellClass.ROGUE, CellClass.REGULAR],
                        [CellClass.NO_SERVICE, CellClass.MUSH_REGULAR_STRONGER]], dtype=np.uint8)
    z = np.zeros((2, 2))
    return gridsim.GridMap(s, s.grid.x_centers, s.grid.y_centers, z - 70.0, z - 80.0, classes)


def test_pgm_two_by_two_bytes():
    # north row first in the image
    assert gridsim.pgm_bytes(_tiny_map()) == b"P5\n2 2\n255\n" + bytes([255, 100, 60, 200])


def test_pgm_gray_levels_distinct():
    assert len(set(gridsim.PGM_GRAY.values())) == len(CellClass)


def test_csv_round_trip(tmp_path):
    s = two_tx(propagation=PropagationParams(PathLossModel.TWO_SLOPE, d0=10.0, n=3.0, sigma=6.0), seed=3)
    m = gridsim.simulate(s)
    path = tmp_path / "r.csv"
    gridsim.write_raster(m, path, "csv")
    t = gridsim.read_csv_raster(path)
    X, Y = np.meshgrid(m.x, m.y)
    assert np.array_equal(t.x, X.ravel()) and np.array_equal(t.y, Y.ravel())
    assert np.array_equal(t.pr_reg, m.pr_reg.ravel())
    assert np.array_equal(t.pr_rogue, m.pr_rogue.ravel())
    assert np.array_equal(t.classes, m.classes.ravel())


def test_unknown_format(tmp_path):
    with pytest.raises(ValueError):
        gridsim.write_raster(_tiny_map(), tmp_path / "x", "tiff")


# presets -------------------------------------------------------------------

@pytest.mark.parametrize("case", sorted(scenarios.ATTACKER_CASES))
def test_fixed_reception_preset_ordering(case):
    st_ = gridsim.statistics(gridsim.simulate(scenarios.fixed_reception(case, resolution=25.0)))
    assert st_.rogue_pct < st_.mush_pct < st_.regular_pct
    assert st_.rogue_pct < 1.0
