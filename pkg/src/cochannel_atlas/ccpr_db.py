"""Co-channel protection ratios and minimum C/N values for DVB-T and DVB-T2.

Values are stored to one decimal, exactly as tabulated. Cells
without a value are absent from the table: :func:`lookup` returns ``None``
for them, never zero.

Sources:

* ``M1``: minimum C/N measured with professional test equipment (subjective
  failure point).
* ``M2``: CCPR measured with the automated two-transmitter rig (Gaussian only).
* ``Reimers``, ``ETSI``: calculated C/N for quasi-error-free reception.
* ``ITU``: ITU-R co-channel protection ratios, DVB-T into DVB-T.
* ``DTVP``: simulated C/N for the two DVB-T2 variants.
"""
from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass
from typing import Iterator

TABLE_VERSION = "2018.1"

CSV_HEADER = ("standard", "modulation", "code_rate", "channel", "source", "ccpr_db")


class Standard(str, enum.Enum):
    DVB_T = "DVB-T"
    DVB_T2 = "DVB-T2"


class Channel(str, enum.Enum):
    GAUSSIAN = "Gaussian"
    RICEAN = "Ricean"
    RAYLEIGH = "Rayleigh"


class Source(str, enum.Enum):
    M1 = "M1"
    M2 = "M2"
    REIMERS = "Reimers"
    ETSI = "ETSI"
    ITU = "ITU"
    DTVP = "DTVP"


DVBT_MODULATIONS = ("QPSK", "16QAM", "64QAM")
CODE_RATES = ("1/2", "3/5", "2/3", "3/4", "5/6", "7/8")
T2_VARIANTS = {
    "G2": "16Ke 64QAM CR3/5 PP2",
    "G8": "32Ke 64QAM CR2/3 PP4",
}

_MOD_ALIASES = {
    "QPSK": "QPSK", "4QAM": "QPSK",
    "16QAM": "16QAM", "16-QAM": "16QAM",
    "64QAM": "64QAM", "64-QAM": "64QAM",
    "G2": "G2", "G8": "G8",
}
_CHANNEL_ALIASES = {
    "gaussian": Channel.GAUSSIAN, "gauss": Channel.GAUSSIAN, "awgn": Channel.GAUSSIAN,
    "ricean": Channel.RICEAN, "rice": Channel.RICEAN, "rician": Channel.RICEAN,
    "rayleigh": Channel.RAYLEIGH,
}
_SOURCE_ALIASES = {s.value.lower(): s for s in Source} | {"reim": Source.REIMERS, "reim.": Source.REIMERS}


def modulation_order(modulation: str) -> int:
    return {"QPSK": 4, "16QAM": 16, "64QAM": 64, "G2": 64, "G8": 64}[modulation]


@dataclass(frozen=True)
class CcprKey:
    """Lookup key. DVB-T2 variants carry ``code_rate=None`` (fixed by the variant)."""

    standard: Standard
    modulation: str
    code_rate: str | None
    channel: Channel = Channel.GAUSSIAN
    source: Source = Source.M2

    def __post_init__(self) -> None:
        object.__setattr__(self, "standard", Standard(self.standard))
        object.__setattr__(self, "channel", parse_channel(self.channel))
        object.__setattr__(self, "source", parse_source(self.source))
        mod = _MOD_ALIASES.get(str(self.modulation).upper())
        if mod is None:
            raise ValueError(f"unknown modulation {self.modulation!r}")
        object.__setattr__(self, "modulation", mod)
        if self.standard is Standard.DVB_T2:
            if mod not in T2_VARIANTS:
                raise ValueError(f"DVB-T2 modes are identified by variant id {sorted(T2_VARIANTS)}, got {mod!r}")
            if self.code_rate not in (None, "", "-", "\u2014"):
                raise ValueError("DVB-T2 variants fix the code rate; pass code_rate=None")
            object.__setattr__(self, "code_rate", None)
        else:
            if mod not in DVBT_MODULATIONS:
                raise ValueError(f"DVB-T modulation must be one of {DVBT_MODULATIONS}, got {mod!r}")
            if self.code_rate not in CODE_RATES:
                raise ValueError(f"code rate must be one of {CODE_RATES}, got {self.code_rate!r}")

    def with_(self, **changes) -> CcprKey:
        fields = {
            "standard": self.standard, "modulation": self.modulation, "code_rate": self.code_rate,
            "channel": self.channel, "source": self.source,
        }
        fields.update(changes)
        return CcprKey(**fields)

    def __str__(self) -> str:
        parts = [self.standard.value, self.modulation]
        if self.code_rate is not None:
            parts.append(self.code_rate)
        parts += [self.channel.value, self.source.value]
        return ":".join(parts)

    @classmethod
    def parse(cls, text: str) -> CcprKey:
        """Parse the compact ``standard:modulation[:code_rate]:channel:source`` form.

        Trailing channel/source may be omitted (defaults: Gaussian, M2 for
        DVB-T and M1 for DVB-T2).
        """
        parts = [p.strip() for p in text.split(":")]
        if not parts or parts[0] not in {s.value for s in Standard}:
            raise ValueError(f"mode {text!r} must start with DVB-T or DVB-T2")
        std = Standard(parts[0])
        if std is Standard.DVB_T:
            if len(parts) < 3:
                raise ValueError(f"DVB-T mode {text!r} needs modulation and code rate")
            mod, cr, rest = parts[1], parts[2], parts[3:]
        else:
            if len(parts) < 2:
                raise ValueError(f"DVB-T2 mode {text!r} needs a variant id")
            mod, cr, rest = parts[1], None, parts[2:]
        if len(rest) > 2:
            raise ValueError(f"too many fields in mode {text!r}")
        channel = rest[0] if rest else Channel.GAUSSIAN
        default_source = Source.M2 if std is Standard.DVB_T else Source.M1
        source = rest[1] if len(rest) > 1 else default_source
        return cls(std, mod, cr, channel, source)

    @classmethod
    def from_obj(cls, obj) -> CcprKey:
        if isinstance(obj, CcprKey):
            return obj
        if isinstance(obj, str):
            return cls.parse(obj)
        return cls(
            obj["standard"], obj["modulation"], obj.get("code_rate"),
            obj.get("channel", Channel.GAUSSIAN), obj.get("source", Source.M2),
        )


def parse_channel(value) -> Channel:
    if isinstance(value, Channel):
        return value
    try:
        return _CHANNEL_ALIASES[str(value).lower()]
    except KeyError:
        raise ValueError(f"unknown channel {value!r}") from None


def parse_source(value) -> Source:
    if isinstance(value, Source):
        return value
    try:
        return _SOURCE_ALIASES[str(value).lower()]
    except KeyError:
        raise ValueError(f"unknown source {value!r}") from None


class NoEntryError(LookupError):
    """No table entry exists for the requested (standard, channel, source)."""


# Column layout of the DVB-T table, one tuple per code-rate row.
_DVBT_COLUMNS = (
    (Channel.GAUSSIAN, Source.M1), (Channel.GAUSSIAN, Source.M2), (Channel.GAUSSIAN, Source.REIMERS),
    (Channel.GAUSSIAN, Source.ETSI), (Channel.GAUSSIAN, Source.ITU),
    (Channel.RICEAN, Source.M1), (Channel.RICEAN, Source.REIMERS), (Channel.RICEAN, Source.ETSI),
    (Channel.RICEAN, Source.ITU),
    (Channel.RAYLEIGH, Source.M1), (Channel.RAYLEIGH, Source.REIMERS), (Channel.RAYLEIGH, Source.ETSI),
    (Channel.RAYLEIGH, Source.ITU),
)
_NA = None  # blank cell
_DVBT_ROWS = {
    ("QPSK", "1/2"): (2.0, 2.5, 3.1, 3.5, 5, 2.8, 3.6, 4.1, 6, 4.1, 5.4, 5.9, 8),
    ("QPSK", "2/3"): (3.8, 3.5, 4.9, 5.3, 7, 4.8, 5.7, 6.1, 8, 7.1, 8.4, 9.6, 11),
    ("QPSK", "3/4"): (4.7, 5.0, 5.9, 6.3, _NA, 5.9, 6.8, 7.2, _NA, 9.1, 10.7, 12.4, _NA),
    ("QPSK", "5/6"): (5.8, 6.0, 6.9, 7.3, _NA, 7.3, 8.0, 8.5, _NA, 12.0, 13.1, 15.6, _NA),
    ("QPSK", "7/8"): (6.4, 7.0, 7.7, 7.9, _NA, 8.0, 8.7, 9.2, _NA, 13.9, 16.3, 17.5, _NA),
    ("16QAM", "1/2"): (7.3, 8.0, 8.8, 9.3, 10, 8.1, 9.6, 9.8, 11, 9.4, 11.2, 11.8, 13),
    ("16QAM", "2/3"): (9.6, 10.0, 11.1, 11.4, 13, 10.6, 11.6, 12.1, 14, 12.7, 14.2, 15.3, 16),
    ("16QAM", "3/4"): (10.8, 11.0, 12.5, 12.6, 14, 12.0, 13.0, 13.4, 15, 14.7, 16.7, 18.1, 18),
    ("16QAM", "5/6"): (12.1, 12.5, 13.5, 13.8, _NA, 13.4, 14.4, 14.8, _NA, 17.5, 19.3, 21.3, _NA),
    ("16QAM", "7/8"): (12.8, 13.0, 13.9, 14.4, _NA, 14.3, 15.0, 15.7, _NA, 19.5, 22.8, 23.6, _NA),
    ("64QAM", "1/2"): (11.5, 11.5, 14.4, 13.8, 16, 12.4, 14.7, 14.3, 17, 13.9, 16.0, 16.4, 19),
    ("64QAM", "2/3"): (14.7, 15.0, 16.5, 16.7, 19, 15.5, 17.1, 17.3, 20, 17.4, 19.3, 20.3, 23),
    ("64QAM", "3/4"): (16.2, 16.5, 18.0, 18.2, 20, 17.3, 18.6, 18.9, 21, 19.8, 21.7, 23.0, 25),
    ("64QAM", "5/6"): (17.7, 18.5, 19.3, 19.4, _NA, 18.9, 20.0, 20.4, _NA, 22.5, 25.3, 26.2, _NA),
    ("64QAM", "7/8"): (18.6, 19.5, 20.1, 20.2, _NA, 19.9, 21.0, 21.3, _NA, 24.7, 27.9, 28.6, _NA),
}
_T2_COLUMNS = (
    (Channel.GAUSSIAN, Source.M1), (Channel.GAUSSIAN, Source.DTVP),
    (Channel.RICEAN, Source.M1), (Channel.RICEAN, Source.DTVP),
    (Channel.RAYLEIGH, Source.M1), (Channel.RAYLEIGH, Source.DTVP),
)
_T2_ROWS = {
    "G2": (12.8, 14.8, 13.3, 15.1, 15.2, 16.9),
    "G8": (14.1, 15.7, 14.7, 16.1, 16.8, 17.9),
}


def _build() -> dict[CcprKey, float]:
    table: dict[CcprKey, float] = {}
    for (mod, cr), row in _DVBT_ROWS.items():
        for (channel, source), value in zip(_DVBT_COLUMNS, row, strict=True):
            if value is not None:
                table[CcprKey(Standard.DVB_T, mod, cr, channel, source)] = float(value)
    for variant, row in _T2_ROWS.items():
        for (channel, source), value in zip(_T2_COLUMNS, row, strict=True):
            table[CcprKey(Standard.DVB_T2, variant, None, channel, source)] = float(value)
    return table


_TABLE = _build()


def lookup(key: CcprKey) -> float | None:
    """Table value in dB, or ``None`` when the table has no number for the cell."""
    return _TABLE.get(key)


def require(key: CcprKey) -> float:
    """Like :func:`lookup` but raises :class:`NoEntryError` for blank cells."""
    value = lookup(key)
    if value is None:
        raise NoEntryError(f"no table value for {key}")
    return value


def entries() -> Iterator[tuple[CcprKey, float]]:
    """All populated cells in table order."""
    return iter(_TABLE.items())


def _robustness_order(item: tuple[CcprKey, float]):
    key, value = item
    cr = CODE_RATES.index(key.code_rate) if key.code_rate is not None else -1
    return (value, cr, modulation_order(key.modulation), key.modulation)


def most_robust_mode(standard, channel, source) -> tuple[CcprKey, float]:
    """Entry with the smallest ratio for a (standard, channel, source) triple.

    Ties go to the lower code rate, then the lower modulation order.
    """
    standard, channel, source = Standard(standard), parse_channel(channel), parse_source(source)
    candidates = [
        (k, v) for k, v in _TABLE.items()
        if k.standard is standard and k.channel is channel and k.source is source
    ]
    if not candidates:
        raise NoEntryError(f"no entries for {standard.value}/{channel.value}/{source.value}")
    return min(candidates, key=_robustness_order)


def to_csv() -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for key, value in _TABLE.items():
        writer.writerow([
            key.standard.value, key.modulation, key.code_rate or "",
            key.channel.value, key.source.value, f"{value:.1f}",
        ])
    return buf.getvalue()


def read_csv(text: str) -> dict[CcprKey, float]:
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_HEADER:
        raise ValueError(f"unexpected CCPR CSV header {reader.fieldnames}")
    return {
        CcprKey(r["standard"], r["modulation"], r["code_rate"] or None, r["channel"], r["source"]):
            float(r["ccpr_db"])
        for r in reader
    }
