"""Raster coverage simulation of a regular broadcast under a co-channel rogue.

Each cell center receives ``erp + antenna_gain(bearing) - path_loss(distance)``
from each transmitter. Cells are then classified as regular service, rogue
service, mush zone (split by which signal is stronger) or no service.

Shadowing draws are independent per cell and per transmitter. Each grid row
gets its own random stream keyed by (seed, transmitter id, row index), so a
map is bit-identical for a fixed seed regardless of how rows are split across
worker threads.
"""
from __future__ import annotations

import csv
import enum
import json
import math
import os
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from statistics import NormalDist
from typing import Iterable, Sequence

import numpy as np

from . import ccpr_db
from .ccpr_db import CcprKey
from .propagation import PropagationParams, shadowed_path_loss

DEFAULT_MAX_CELLS = 10**8
DBD_TO_DBI = 2.15
TAPER_WIDTH_DEG = 10.0


class CellClass(enum.IntEnum):
    REGULAR = 0
    ROGUE = 1
    MUSH_ROGUE_STRONGER = 2
    MUSH_REGULAR_STRONGER = 3
    NO_SERVICE = 4

    @property
    def label(self) -> str:
        return _CLASS_LABELS[self]

    @classmethod
    def from_label(cls, label: str) -> CellClass:
        return _LABEL_CLASSES[label]


_CLASS_LABELS = {
    CellClass.REGULAR: "regular",
    CellClass.ROGUE: "rogue",
    CellClass.MUSH_ROGUE_STRONGER: "mush_rogue_stronger",
    CellClass.MUSH_REGULAR_STRONGER: "mush_regular_stronger",
    CellClass.NO_SERVICE: "no_service",
}
_LABEL_CLASSES = {v: k for k, v in _CLASS_LABELS.items()}

PGM_GRAY = {
    CellClass.REGULAR: 200,
    CellClass.ROGUE: 60,
    CellClass.MUSH_ROGUE_STRONGER: 20,
    CellClass.MUSH_REGULAR_STRONGER: 100,
    CellClass.NO_SERVICE: 255,
}

CSV_HEADER = ("x_m", "y_m", "pr_reg_dbm", "pr_rogue_dbm", "class")


class GridSizeError(ValueError):
    pass


# -- antennas ---------------------------------------------------------------


@dataclass(frozen=True)
class Omni:
    def gain(self, bearing_deg):
        return np.zeros_like(np.asarray(bearing_deg, dtype=float))


@dataclass(frozen=True)
class Directive:
    """Flat main lobe, flat back lobe at ``-front_to_back`` dB.

    Gain is relative to the main lobe (the transmitter ERP already includes
    the boresight gain). The transition between lobes is a raised-cosine taper
    in dB spanning 10 degrees.
    """

    bearing: float
    beamwidth: float
    front_to_back: float

    def __post_init__(self) -> None:
        if not 0.0 < self.beamwidth < 360.0:
            raise ValueError(f"beamwidth must be in (0, 360), got {self.beamwidth}")
        if self.front_to_back < 0:
            raise ValueError("front-to-back ratio must be >= 0 dB")

    def gain(self, bearing_deg):
        off = np.abs((np.asarray(bearing_deg, dtype=float) - self.bearing + 180.0) % 360.0 - 180.0)
        half = self.beamwidth / 2.0
        t = np.clip((off - half) / TAPER_WIDTH_DEG, 0.0, 1.0)
        return -self.front_to_back * (1.0 - np.cos(math.pi * t)) / 2.0


Antenna = Omni | Directive


def dbd_to_dbi(gain_dbd: float) -> float:
    return gain_dbd + DBD_TO_DBI


# -- scenario ---------------------------------------------------------------


class Role(str, enum.Enum):
    REGULAR = "regular"
    ROGUE = "rogue"


class Variability(str, enum.Enum):
    RANDOM = "random"  # per-cell shadowing draws
    MARGIN = "margin"  # deterministic location-probability margin


@dataclass(frozen=True)
class Transmitter:
    """A transmitter on the grid.

    ``propagation`` optionally overrides the scenario's path-loss model for
    this transmitter only (e.g. a street-level rogue against an elevated
    broadcast mast).
    """

    id: str
    role: Role
    x: float
    y: float
    erp: float
    antenna: Omni | Directive = field(default_factory=Omni)
    mode: CcprKey | None = None
    height_tag: str = ""
    propagation: PropagationParams | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "role", Role(self.role))
        if math.isnan(self.erp) or self.erp == math.inf:
            raise ValueError(f"transmitter {self.id!r}: ERP must be finite or -inf")


@dataclass(frozen=True)
class Grid:
    """Rectangular raster; ``(x0, y0)`` is the south-west corner in meters."""

    x0: float
    y0: float
    width: float
    height: float
    resolution: float

    def __post_init__(self) -> None:
        if not self.resolution > 0:
            raise ValueError(f"resolution must be > 0, got {self.resolution}")
        if not (self.width > 0 and self.height > 0):
            raise ValueError("grid width and height must be > 0")

    @property
    def shape(self) -> tuple[int, int]:
        """``(ny, nx)``"""
        nx = max(1, math.ceil(self.width / self.resolution - 1e-9))
        ny = max(1, math.ceil(self.height / self.resolution - 1e-9))
        return ny, nx

    @property
    def x_centers(self) -> np.ndarray:
        return self.x0 + (np.arange(self.shape[1]) + 0.5) * self.resolution

    @property
    def y_centers(self) -> np.ndarray:
        return self.y0 + (np.arange(self.shape[0]) + 0.5) * self.resolution

    @classmethod
    def centered(cls, cx: float, cy: float, half_width: float, resolution: float) -> Grid:
        return cls(cx - half_width, cy - half_width, 2 * half_width, 2 * half_width, resolution)


@dataclass(frozen=True)
class Scenario:
    """One regular and one rogue transmitter over a grid.

    ``alpha_reg`` / ``alpha_rogue`` default to the CCPR table entries of the
    transmitters' modes. ``constant_pr_reg`` replaces the computed regular
    level with a constant in every cell (the closed-form geometry's
    assumption).
    """

    transmitters: tuple[Transmitter, ...]
    frequency: float
    propagation: PropagationParams
    grid: Grid
    alpha_reg: float | None = None
    alpha_rogue: float | None = None
    noise_floor: float = -math.inf
    seed: int = 0
    constant_pr_reg: float | None = None
    variability: Variability = Variability.RANDOM
    location_probability: float = 0.95
    max_cells: int = DEFAULT_MAX_CELLS

    def __post_init__(self) -> None:
        object.__setattr__(self, "transmitters", tuple(self.transmitters))
        object.__setattr__(self, "variability", Variability(self.variability))
        roles = [t.role for t in self.transmitters]
        if roles.count(Role.REGULAR) != 1 or roles.count(Role.ROGUE) != 1 or len(roles) != 2:
            raise ValueError("a scenario needs exactly one regular and one rogue transmitter")
        if not self.frequency > 0:
            raise ValueError("frequency must be positive")
        if not 0.5 <= self.location_probability < 1.0:
            raise ValueError("location probability must be in [0.5, 1)")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        for name, tx in (("alpha_reg", self.regular), ("alpha_rogue", self.rogue)):
            if getattr(self, name) is None:
                if tx.mode is None:
                    raise ValueError(f"{name} not given and transmitter {tx.id!r} has no mode")
                object.__setattr__(self, name, ccpr_db.require(tx.mode))
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        ny, nx = self.grid.shape
        if nx * ny > self.max_cells:
            raise GridSizeError(f"grid has {nx * ny} cells, cap is {self.max_cells}")

    @property
    def regular(self) -> Transmitter:
        return next(t for t in self.transmitters if t.role is Role.REGULAR)

    @property
    def rogue(self) -> Transmitter:
        return next(t for t in self.transmitters if t.role is Role.ROGUE)

    def params_for(self, tx: Transmitter) -> PropagationParams:
        return tx.propagation or self.propagation


@dataclass
class GridMap:
    """Per-cell received powers and classes; arrays are indexed ``[row, col]``
    with row 0 at the southern edge."""

    scenario: Scenario
    x: np.ndarray
    y: np.ndarray
    pr_reg: np.ndarray
    pr_rogue: np.ndarray
    classes: np.ndarray

    @property
    def seed(self) -> int:
        return self.scenario.seed

    @property
    def shape(self) -> tuple[int, int]:
        return self.classes.shape


# -- simulation -------------------------------------------------------------


def _stream_key(tx_id: str) -> int:
    return zlib.crc32(tx_id.encode("utf-8"))


def _row_draws(seed: int, tx_id: str, row: int, n: int) -> np.ndarray:
    ss = np.random.SeedSequence(seed, spawn_key=(_stream_key(tx_id), row))
    return np.random.default_rng(ss).standard_normal(n)


def _received_rows(s: Scenario, tx: Transmitter, rows: range, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    params = s.params_for(tx)
    out = np.empty((len(rows), xs.size))
    if tx.erp == -math.inf:
        out.fill(-math.inf)
        return out
    dx = xs - tx.x
    floor = s.grid.resolution / 2.0
    use_draws = s.variability is Variability.RANDOM and params.sigma > 0
    for i, row in enumerate(rows):
        dy = ys[row] - tx.y
        d = np.maximum(np.hypot(dx, dy), floor)
        gain = tx.antenna.gain(np.degrees(np.arctan2(dx, dy)))
        draw = _row_draws(s.seed, tx.id, row, xs.size) if use_draws else 0.0
        out[i] = tx.erp + gain - shadowed_path_loss(d, params, s.frequency, draw)
    if s.variability is Variability.MARGIN and params.sigma > 0:
        out -= NormalDist().inv_cdf(s.location_probability) * params.sigma
    return out


def classify(pr_reg, pr_rogue, alpha_reg: float, alpha_rogue: float, noise_floor: float = -math.inf):
    """Vectorized three-way classification with the mush zone split in two.

    Thresholds are inclusive: a signal exactly ``alpha`` above the other is
    received. A cell meeting both conditions (only possible when both ratios
    are zero) goes to the rogue.
    """
    pr_reg = np.asarray(pr_reg, dtype=float)
    pr_rogue = np.asarray(pr_rogue, dtype=float)
    rogue_ok = (pr_rogue >= pr_reg + alpha_rogue) & (pr_rogue >= noise_floor)
    reg_ok = (pr_reg >= pr_rogue + alpha_reg) & (pr_reg >= noise_floor)
    no_service = np.maximum(pr_reg, pr_rogue) < noise_floor
    mush = np.where(pr_rogue >= pr_reg, CellClass.MUSH_ROGUE_STRONGER, CellClass.MUSH_REGULAR_STRONGER)
    out = np.select(
        [rogue_ok, reg_ok, no_service],
        [CellClass.ROGUE, CellClass.REGULAR, CellClass.NO_SERVICE],
        default=mush,
    )
    return out.astype(np.uint8)


def resolve_threads(threads: int | None = None) -> int:
    """``threads`` if positive, else ``$COCHANNEL_ATLAS_THREADS``, else CPU count."""
    if threads is None:
        env = os.environ.get("COCHANNEL_ATLAS_THREADS")
        threads = int(env) if env else 0
    if threads < 0:
        raise ValueError("thread count must be >= 0")
    return threads or (os.cpu_count() or 1)


def simulate(s: Scenario, threads: int | None = 1) -> GridMap:
    ny, nx = s.grid.shape
    xs, ys = s.grid.x_centers, s.grid.y_centers
    pr_reg = np.empty((ny, nx))
    pr_rogue = np.empty((ny, nx))

    def work(rows: range) -> None:
        sl = slice(rows.start, rows.stop)
        if s.constant_pr_reg is None:
            pr_reg[sl] = _received_rows(s, s.regular, rows, xs, ys)
        else:
            pr_reg[sl] = s.constant_pr_reg
        pr_rogue[sl] = _received_rows(s, s.rogue, rows, xs, ys)

    n_threads = min(resolve_threads(threads), ny)
    chunk = max(1, math.ceil(ny / (4 * n_threads)))
    blocks = [range(r, min(r + chunk, ny)) for r in range(0, ny, chunk)]
    if n_threads == 1:
        for b in blocks:
            work(b)
    else:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            list(pool.map(work, blocks))

    classes = classify(pr_reg, pr_rogue, s.alpha_reg, s.alpha_rogue, s.noise_floor)
    return GridMap(s, xs, ys, pr_reg, pr_rogue, classes)


# -- statistics -------------------------------------------------------------


@dataclass(frozen=True)
class ClassStats:
    counts: dict[CellClass, int]

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def pct(self, *classes: CellClass) -> float:
        return 100.0 * sum(self.counts.get(c, 0) for c in classes) / self.total

    @property
    def regular_pct(self) -> float:
        return self.pct(CellClass.REGULAR)

    @property
    def rogue_pct(self) -> float:
        return self.pct(CellClass.ROGUE)

    @property
    def mush_pct(self) -> float:
        return self.pct(CellClass.MUSH_ROGUE_STRONGER, CellClass.MUSH_REGULAR_STRONGER)

    @property
    def no_service_pct(self) -> float:
        return self.pct(CellClass.NO_SERVICE)

    def to_dict(self) -> dict[str, float]:
        return {
            "regular_pct": self.regular_pct,
            "rogue_pct": self.rogue_pct,
            "mush_pct": self.mush_pct,
            "mush_rogue_stronger_pct": self.pct(CellClass.MUSH_ROGUE_STRONGER),
            "mush_regular_stronger_pct": self.pct(CellClass.MUSH_REGULAR_STRONGER),
            "no_service_pct": self.no_service_pct,
        }


def region_mask(m: GridMap, region) -> np.ndarray:
    """Cells whose center lies in (or on the boundary of) a polygon."""
    import shapely

    poly = region if isinstance(region, shapely.Geometry) else shapely.Polygon(region)
    X, Y = np.meshgrid(m.x, m.y)
    return shapely.intersects_xy(poly, X, Y)


def statistics(m: GridMap, region: Sequence[tuple[float, float]] | None = None) -> ClassStats:
    """Location percentages per class, over the whole map or a polygon region."""
    values = m.classes if region is None else m.classes[region_mask(m, region)]
    if values.size == 0:
        raise ValueError("region contains no grid cells")
    hist = np.bincount(values.ravel(), minlength=len(CellClass))
    return ClassStats({c: int(hist[c]) for c in CellClass})


# -- output -----------------------------------------------------------------


def pgm_bytes(m: GridMap) -> bytes:
    lut = np.zeros(256, dtype=np.uint8)
    for c, gray in PGM_GRAY.items():
        lut[c] = gray
    ny, nx = m.shape
    # image rows run north to south
    body = lut[m.classes[::-1]].tobytes()
    return f"P5\n{nx} {ny}\n255\n".encode("ascii") + body


def write_raster(m: GridMap, path: str | os.PathLike, fmt: str = "pgm") -> None:
    fmt = fmt.lower()
    path = Path(path)
    if fmt == "pgm":
        path.write_bytes(pgm_bytes(m))
    elif fmt == "csv":
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_HEADER)
            for j, y in enumerate(m.y):
                for i, x in enumerate(m.x):
                    w.writerow([
                        repr(float(x)), repr(float(y)),
                        repr(float(m.pr_reg[j, i])), repr(float(m.pr_rogue[j, i])),
                        CellClass(m.classes[j, i]).label,
                    ])
    else:
        raise ValueError(f"unknown raster format {fmt!r} (expected pgm or csv)")


@dataclass
class RasterTable:
    x: np.ndarray
    y: np.ndarray
    pr_reg: np.ndarray
    pr_rogue: np.ndarray
    classes: np.ndarray


def read_csv_raster(path: str | os.PathLike) -> RasterTable:
    """Read a CSV raster back as flat per-cell columns."""
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != CSV_HEADER:
            raise ValueError(f"unexpected raster header {header}")
        rows = list(reader)
    cols = list(zip(*rows)) if rows else [()] * 5
    return RasterTable(
        x=np.array(cols[0], dtype=float),
        y=np.array(cols[1], dtype=float),
        pr_reg=np.array(cols[2], dtype=float),
        pr_rogue=np.array(cols[3], dtype=float),
        classes=np.array([CellClass.from_label(c) for c in cols[4]], dtype=np.uint8),
    )


def stats_json(stats: ClassStats) -> str:
    return json.dumps(stats.to_dict(), indent=2) + "\n"


def write_stats(stats: ClassStats, path: str | os.PathLike) -> None:
    Path(path).write_text(stats_json(stats))


def disc_radius(m: GridMap, cls: Iterable[CellClass], center: tuple[float, float]) -> float:
    """Largest center-to-cell distance among cells of the given classes."""
    mask = np.isin(m.classes, [int(c) for c in cls])
    if not mask.any():
        return 0.0
    X, Y = np.meshgrid(m.x, m.y)
    return float(np.hypot(X[mask] - center[0], Y[mask] - center[1]).max())
