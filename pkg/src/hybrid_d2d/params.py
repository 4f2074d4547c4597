"""System parameters for the hybrid backscatter / harvest-then-transmit link.

All quantities are SI and linear. Decibel inputs are converted once, at the
configuration boundary (see :func:`load_config`).
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

__all__ = [
    "ParameterError",
    "SystemParams",
    "Thresholds",
    "validate",
    "derived_thresholds",
    "db_to_linear",
    "dbm_to_watts",
    "linear_to_db",
    "convert_db",
    "params_from_dict",
    "load_config",
    "SWEEPABLE_FIELDS",
]

LOAD_MODELS = ("kernel", "thinning")


class ParameterError(ValueError):
    """A parameter violates its admissible range."""

    def __init__(self, field: str, value: Any, bound: str):
        self.field = field
        self.value = value
        self.bound = bound
        super().__init__(f"{field}={value!r} violates {bound}")


@dataclass(frozen=True)
class SystemParams:
    """Physical parameters of one deployment.

    Defaults reproduce the evaluation setting: path-loss exponent 4, 5 m link,
    100 m windows, 0.2 W ambient transmitters, -40 dB / 5 dB thresholds,
    113 uW / 8.9 uW circuit power and -90 dBm noise, with equal harvesting
    and transmission phases.

    ``load_model`` selects how the transmission loads act on the ambient
    fields. ``"kernel"`` treats the active transmitters as an alpha-Ginibre
    field with density ``l * zeta`` (the kernel used by the closed-form
    coverage expressions); ``"thinning"`` draws the field at density ``zeta``
    and keeps each point with probability ``l``. Both the simulator and the
    analytic evaluator honour the same choice, so they always describe the
    same process.
    """

    P_A: float = 0.2
    P_B: float = 0.2
    zeta_A: float = 0.04
    xi: float = 0.2
    l_A: float = 1.0
    l_B: float = 1.0
    alpha: float = 1.0
    R: float = 100.0
    mu: float = 4.0
    m: float = 1.0
    d: float = 5.0
    beta: float = 0.3
    eta: float = 0.625
    delta: float = 1.0
    omega: float = 0.5
    rho_B: float = 8.9e-6
    rho_H: float = 113e-6
    tau_B: float = 10 ** 0.5
    tau_H: float = 1e-4
    sigma2: float = 1e-12
    T_B: float = 1e3
    stp_shared_fading: bool = False
    load_model: str = "kernel"

    def __post_init__(self):
        _check(self)

    @property
    def zeta_B(self) -> float:
        return self.xi * self.zeta_A

    @property
    def active_density_A(self) -> float:
        """Intensity of transmitting points around the transmitter."""
        return self.l_A * self.zeta_A

    @property
    def active_density_B(self) -> float:
        """Intensity of transmitting interferers around the receiver."""
        return self.l_B * self.zeta_B

    def replace(self, **changes) -> "SystemParams":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class Thresholds:
    """Minimum incident power (W) that keeps each mode's circuit running."""

    pi_min_backscatter: float
    pi_min_htt: float


def _require(ok: bool, field: str, value, bound: str):
    if not ok:
        raise ParameterError(field, value, bound)


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and not math.isnan(x)


def _check(p: SystemParams) -> None:
    for f in dataclasses.fields(p):
        if f.name in ("stp_shared_fading", "load_model"):
            continue
        _require(_is_number(getattr(p, f.name)), f.name, getattr(p, f.name), "a real number")

    for name in ("P_A", "P_B", "R", "d", "sigma2", "tau_B", "tau_H", "T_B"):
        v = getattr(p, name)
        _require(v > 0, name, v, "> 0")
    for name in ("zeta_A", "xi", "rho_B", "rho_H"):
        v = getattr(p, name)
        _require(0 <= v < math.inf, name, v, ">= 0 and finite")
    for name in ("P_A", "P_B", "R", "d", "mu", "m"):
        v = getattr(p, name)
        _require(v < math.inf, name, v, "finite")

    _require(p.mu > 2, "mu", p.mu, "> 2 (finite far-field aggregate power)")
    _require(0 < p.alpha <= 1, "alpha", p.alpha, "in (0, 1]; use the PPP sampler for alpha -> 0")
    _require(p.m >= 0.5, "m", p.m, ">= 0.5 (Nakagami shape)")
    _require(0 <= p.l_A <= 1, "l_A", p.l_A, "in [0, 1]")
    _require(0 <= p.l_B <= 1, "l_B", p.l_B, "in [0, 1]")
    _require(0 < p.beta <= 1, "beta", p.beta, "in (0, 1]")
    _require(0 < p.eta < 1, "eta", p.eta, "in (0, 1)")
    _require(0 < p.delta <= 1, "delta", p.delta, "in (0, 1]")
    _require(0 < p.omega < 1, "omega", p.omega, "in (0, 1)")
    _require(isinstance(p.stp_shared_fading, bool), "stp_shared_fading", p.stp_shared_fading, "a bool")
    _require(p.load_model in LOAD_MODELS, "load_model", p.load_model, f"one of {LOAD_MODELS}")


def validate(raw: SystemParams) -> SystemParams:
    """Return ``raw`` unchanged if every invariant holds, else raise ParameterError."""
    _check(raw)
    return raw


def derived_thresholds(p: SystemParams) -> Thresholds:
    return Thresholds(
        pi_min_backscatter=p.rho_B / (p.beta * p.eta),
        pi_min_htt=p.rho_H / (p.omega * p.beta),
    )


def db_to_linear(value_db: float) -> float:
    return 10.0 ** (value_db / 10.0)


def dbm_to_watts(value_dbm: float) -> float:
    return 10.0 ** (value_dbm / 10.0) * 1e-3


def linear_to_db(value: float) -> float:
    return 10.0 * math.log10(value)


def convert_db(value_db: float, kind: str = "ratio") -> float:
    """Convert dB (``kind="ratio"``) or dBm (``kind="power"``) to linear units."""
    if not math.isfinite(value_db):
        raise ValueError(f"finite input required, got {value_db!r}")
    if kind == "ratio":
        return db_to_linear(value_db)
    if kind == "power":
        return dbm_to_watts(value_db)
    raise ValueError(f"kind must be 'ratio' or 'power', got {kind!r}")


# config keys given in dB, mapped to (field, kind)
_DB_KEYS = {
    "tau_B_db": ("tau_B", "ratio"),
    "tau_H_db": ("tau_H", "ratio"),
    "sigma2_dbm": ("sigma2", "power"),
    "P_A_dbm": ("P_A", "power"),
    "P_B_dbm": ("P_B", "power"),
}

FIELD_NAMES = tuple(f.name for f in dataclasses.fields(SystemParams))
SWEEPABLE_FIELDS = tuple(
    f.name for f in dataclasses.fields(SystemParams) if f.name not in ("stp_shared_fading", "load_model")
)


def params_from_dict(values: Mapping[str, Any], base: SystemParams | None = None) -> SystemParams:
    """Build parameters from a flat mapping, accepting the dB-suffixed alternates."""
    changes: dict[str, Any] = {}
    for key, value in values.items():
        if key in _DB_KEYS:
            field, kind = _DB_KEYS[key]
            if field in values:
                raise ValueError(f"both {field!r} and {key!r} given")
            changes[field] = convert_db(float(value), kind)
        elif key in FIELD_NAMES:
            if key in ("stp_shared_fading", "load_model"):
                changes[key] = value
            else:
                changes[key] = float(value)
        else:
            raise KeyError(f"unknown parameter {key!r}")
    return dataclasses.replace(base or SystemParams(), **changes)


def load_config(path: str | Path) -> tuple[SystemParams, dict]:
    """Read a JSON config; returns the parameters and the optional ``run`` section."""
    with open(path) as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise ValueError("config root must be a JSON object")
    run = doc.pop("run", {}) or {}
    params_section = doc.pop("params", None)
    if params_section is None:
        params_section = doc
    elif doc:
        raise KeyError(f"unexpected top-level keys {sorted(doc)}")
    return params_from_dict(params_section), dict(run)
