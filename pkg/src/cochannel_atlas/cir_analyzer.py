"""Classification of geolocated channel-impulse-response measurements.

A synchronized on-channel gap filler stands in for an attacker. At each
measurement point the impulse response shows the original transmitter and the
gap filler's echo of it as separate peaks; the power difference between the
two decides whether the point would be attacker-controlled, mush, or regular
service. Other paths (further SFN transmitters and their echoes) are ignored.

Input is NDJSON, one record per line::

    {"lat": 52.50, "lon": 13.27, "mode": "DVB-T2:G8:Gaussian:M1",
     "paths": [{"delay_us": 0.0, "rel_db": -21.0, "label": "Alexanderplatz"}, ...]}

``rel_db`` is relative to the strongest path, which must be exactly 0 dB.
"""
from __future__ import annotations

import enum
import json
import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Iterator

from . import analytic, ccpr_db
from .ccpr_db import CcprKey


class AmbiguousAssignment(ValueError):
    pass


class InsufficientPaths(ValueError):
    pass


class PointClass(str, enum.Enum):
    CONTROLLED = "controlled"
    MUSH_ECHO = "mush_echo"
    MUSH_ORIGINAL = "mush_original"
    REGULAR = "regular"


# display colors: rogue red, mush dark/light gray by stronger signal, regular green
CLASS_COLORS = {
    PointClass.CONTROLLED: "#d62728",
    PointClass.MUSH_ECHO: "#505050",
    PointClass.MUSH_ORIGINAL: "#b0b0b0",
    PointClass.REGULAR: "#2ca02c",
}


@dataclass(frozen=True)
class SignalPath:
    delay_us: float
    rel_db: float
    label: str | None = None


@dataclass(frozen=True)
class ImpulseResponseRecord:
    lat: float
    lon: float
    paths: tuple[SignalPath, ...]
    mode: CcprKey | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "paths", tuple(self.paths))
        if not self.paths:
            raise InsufficientPaths("record has no paths")
        if any(p.delay_us < 0 for p in self.paths):
            raise ValueError("path delays must be non-negative")
        if max(p.rel_db for p in self.paths) != 0.0:
            raise ValueError("strongest path must be normalized to exactly 0 dB")
        if not (-90.0 <= self.lat <= 90.0 and -180.0 <= self.lon <= 180.0):
            raise ValueError(f"location ({self.lat}, {self.lon}) out of range")

    @classmethod
    def from_dict(cls, obj: dict) -> ImpulseResponseRecord:
        paths = [SignalPath(float(p["delay_us"]), float(p["rel_db"]), p.get("label")) for p in obj["paths"]]
        mode = obj.get("mode")
        return cls(float(obj["lat"]), float(obj["lon"]), tuple(paths), CcprKey.from_obj(mode) if mode else None)

    def to_dict(self) -> dict:
        out = {
            "lat": self.lat,
            "lon": self.lon,
            "paths": [
                {"delay_us": p.delay_us, "rel_db": p.rel_db, **({"label": p.label} if p.label is not None else {})}
                for p in self.paths
            ],
        }
        if self.mode is not None:
            out["mode"] = str(self.mode)
        return out


@dataclass(frozen=True)
class PathAssignment:
    echo_path_index: int
    original_path_index: int


@dataclass(frozen=True)
class LabelMatch:
    """Pick the original and echo paths by label."""

    original: str = "Alexanderplatz"
    echo: str | None = None  # defaults to "<original>-echo"

    @property
    def echo_label(self) -> str:
        return self.echo if self.echo is not None else f"{self.original}-echo"


@dataclass(frozen=True)
class DelayWindow:
    """Original = path nearest ``expected_delay_us``; echo = the single later
    path arriving within ``window_us`` of it."""

    expected_delay_us: float = 0.0
    window_us: float = math.inf


def _label_index(rec: ImpulseResponseRecord, label: str) -> int:
    hits = [i for i, p in enumerate(rec.paths) if p.label == label]
    if not hits:
        raise AmbiguousAssignment(f"no path labeled {label!r}")
    if len(hits) > 1:
        raise AmbiguousAssignment(f"{len(hits)} paths labeled {label!r}")
    return hits[0]


def assign_paths(rec: ImpulseResponseRecord, policy: LabelMatch | DelayWindow | None = None) -> PathAssignment:
    if len(rec.paths) < 2:
        raise InsufficientPaths(f"need at least two paths, record has {len(rec.paths)}")
    if policy is None:
        policy = DelayWindow()

    if isinstance(policy, LabelMatch):
        orig = _label_index(rec, policy.original)
        echo = _label_index(rec, policy.echo_label)
        return PathAssignment(echo, orig)

    gaps = [abs(p.delay_us - policy.expected_delay_us) for p in rec.paths]
    best = min(gaps)
    nearest = [i for i, g in enumerate(gaps) if g == best]
    if len(nearest) > 1:
        raise AmbiguousAssignment(f"{len(nearest)} paths equally close to {policy.expected_delay_us} us")
    orig = nearest[0]
    t0 = rec.paths[orig].delay_us
    later = [i for i, p in enumerate(rec.paths) if t0 < p.delay_us <= t0 + policy.window_us]
    if not later:
        raise AmbiguousAssignment(f"no echo within {policy.window_us} us after {t0} us")
    if len(later) > 1:
        raise AmbiguousAssignment(f"{len(later)} candidate echoes within the delay window")
    return PathAssignment(later[0], orig)


def margin_db(rec: ImpulseResponseRecord, assign: PathAssignment) -> float:
    """Echo power minus original power."""
    return rec.paths[assign.echo_path_index].rel_db - rec.paths[assign.original_path_index].rel_db


def classify_margin(margin: float, alpha_rogue: float, alpha_reg: float) -> PointClass:
    if analytic.can_receive(margin, 0.0, alpha_rogue):
        return PointClass.CONTROLLED
    if analytic.can_receive(0.0, margin, alpha_reg):
        return PointClass.REGULAR
    return PointClass.MUSH_ECHO if margin >= 0 else PointClass.MUSH_ORIGINAL


def classify_point(rec: ImpulseResponseRecord, assign: PathAssignment, alpha_rogue: float, alpha_reg: float) -> PointClass:
    return classify_margin(margin_db(rec, assign), alpha_rogue, alpha_reg)


def resolve_alphas(rec: ImpulseResponseRecord, alpha_rogue: float | None, alpha_reg: float | None) -> tuple[float, float]:
    """Fill missing ratios from the record's mode (echo and original share it)."""
    if alpha_rogue is not None and alpha_reg is not None:
        return alpha_rogue, alpha_reg
    if rec.mode is None:
        raise ValueError("protection ratios not given and record carries no mode")
    value = ccpr_db.require(rec.mode)
    return (value if alpha_rogue is None else alpha_rogue, value if alpha_reg is None else alpha_reg)


@dataclass(frozen=True)
class ClassifiedPoint:
    record: ImpulseResponseRecord
    point_class: PointClass
    margin_db: float


def classify_records(
    records: Iterable[ImpulseResponseRecord],
    alpha_rogue: float | None = None,
    alpha_reg: float | None = None,
    policy: LabelMatch | DelayWindow | None = None,
) -> list[ClassifiedPoint]:
    out = []
    for rec in records:
        a_rogue, a_reg = resolve_alphas(rec, alpha_rogue, alpha_reg)
        assign = assign_paths(rec, policy)
        margin = margin_db(rec, assign)
        out.append(ClassifiedPoint(rec, classify_margin(margin, a_rogue, a_reg), margin))
    return out


def read_ndjson(fh: IO[str]) -> Iterator[ImpulseResponseRecord]:
    for lineno, line in enumerate(fh, 1):
        if not line.strip():
            continue
        try:
            yield ImpulseResponseRecord.from_dict(json.loads(line))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"line {lineno}: {exc}") from exc


def load_ndjson(path: str | os.PathLike) -> list[ImpulseResponseRecord]:
    with Path(path).open() as fh:
        return list(read_ndjson(fh))


def feature_collection(points: Iterable[ClassifiedPoint]) -> dict:
    return {
        "type": "FeatureCollection",
        "features": [
            {
                "type": "Feature",
                "geometry": {"type": "Point", "coordinates": [p.record.lon, p.record.lat]},
                "properties": {"class": p.point_class.value, "margin_db": p.margin_db},
            }
            for p in points
        ],
    }


def emit_geojson(points: Iterable[ClassifiedPoint], path: str | os.PathLike) -> None:
    Path(path).write_text(json.dumps(feature_collection(points), indent=1) + "\n")
