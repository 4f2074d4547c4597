"""Result rows shared by the Monte Carlo sweeps and the command line."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .params import SystemParams
from .protocol import Mode, Protocol

__all__ = ["RunRecord", "CSV_COLUMNS", "write_csv", "write_json", "read_json"]

CSV_COLUMNS = (
    "zeta_a",
    "xi",
    "alpha",
    "l_a",
    "m",
    "protocol",
    "method",
    "variant",
    "shared_fading",
    "coverage",
    "std_err",
    "frac_backscatter",
    "frac_htt",
    "frac_outage",
    "seed",
    "wall_time_ms",
)


@dataclass(frozen=True)
class RunRecord:
    params: dict
    protocol: str
    method: str
    coverage: float
    variant: str | None = None
    shared_fading: bool | None = None
    std_err: float | None = None
    mode_fractions: dict = field(default_factory=dict)
    wall_time_ms: float = 0.0
    seed: int | None = None

    def __post_init__(self):
        if self.method not in ("analytic", "montecarlo"):
            raise ValueError(f"unknown method {self.method!r}")
        if not 0.0 <= self.coverage <= 1.0:
            raise ValueError(f"coverage {self.coverage} outside [0, 1]")
        if self.method == "analytic" and self.std_err is not None:
            raise ValueError("analytic records carry no std_err")

    @classmethod
    def from_estimate(cls, p: SystemParams, protocol, est, seed: int, wall_time_ms: float) -> "RunRecord":
        shared = None
        if isinstance(protocol, tuple):
            protocol, shared = protocol
        protocol = Protocol.parse(protocol)
        if protocol is Protocol.STP and shared is None:
            shared = p.stp_shared_fading
        return cls(
            params=p.to_dict(),
            protocol=protocol.value,
            method="montecarlo",
            coverage=est.coverage,
            shared_fading=shared,
            std_err=est.std_err,
            mode_fractions={m.value: f for m, f in est.mode_fractions.items()},
            wall_time_ms=wall_time_ms,
            seed=seed,
        )

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RunRecord":
        return cls(**d)

    def row(self) -> dict:
        p = self.params
        fr = self.mode_fractions
        return {
            "zeta_a": p["zeta_A"],
            "xi": p["xi"],
            "alpha": p["alpha"],
            "l_a": p["l_A"],
            "m": p["m"],
            "protocol": self.protocol,
            "method": self.method,
            "variant": self.variant or "",
            "shared_fading": "" if self.shared_fading is None else int(self.shared_fading),
            "coverage": repr(float(self.coverage)),
            "std_err": "" if self.std_err is None else repr(float(self.std_err)),
            "frac_backscatter": _frac(fr, Mode.BACKSCATTER),
            "frac_htt": _frac(fr, Mode.HTT),
            "frac_outage": _frac(fr, Mode.ENERGY_OUTAGE),
            "seed": "" if self.seed is None else self.seed,
            "wall_time_ms": f"{self.wall_time_ms:.1f}",
        }


def _frac(fr: dict, mode: Mode) -> str:
    v = fr.get(mode.value)
    return "" if v is None or (isinstance(v, float) and math.isnan(v)) else repr(float(v))


def write_csv(records, path: str | Path | None = None, columns=CSV_COLUMNS) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(columns), extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for r in records:
        writer.writerow(r.row())
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def write_json(records, path: str | Path) -> None:
    Path(path).write_text(json.dumps([r.to_dict() for r in records], indent=1, sort_keys=True))


def read_json(path: str | Path) -> list[RunRecord]:
    return [RunRecord.from_dict(d) for d in json.loads(Path(path).read_text())]
