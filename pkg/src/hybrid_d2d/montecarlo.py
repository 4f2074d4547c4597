"""Monte Carlo coverage estimation, empirical incident-power CDFs and sweeps.

Trials are addressed by index: trial ``i`` always draws from the same
counter-based streams, so results do not depend on the number of worker
threads or on scheduling. Several protocols (and both STP fading
conventions) can be scored on one set of draws.
"""

from __future__ import annotations

import math
import os
import time
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import streams as st
from .params import SWEEPABLE_FIELDS, SystemParams
from .protocol import Mode, Protocol, TrialDraw, TrialOutcome, draw_incident_power, draw_trial, evaluate_trial
from .records import RunRecord

__all__ = [
    "CoverageEstimate",
    "EmpiricalCdf",
    "resolve_threads",
    "run_trials",
    "aggregate",
    "estimate_coverage",
    "estimate_protocols",
    "sample_incident_power",
    "empirical_pi_cdf",
    "sweep",
]

_CHUNK = 2048


@dataclass(frozen=True)
class CoverageEstimate:
    coverage: float
    std_err: float
    n_trials: int
    mode_fractions: dict = field(default_factory=dict)
    # mean SNR/SINR of the chosen mode over trials that were not in outage
    mean_conditional_snr: float = float("nan")


@dataclass(frozen=True)
class EmpiricalCdf:
    grid: np.ndarray
    cdf_values: np.ndarray

    def __post_init__(self):
        if np.any(np.diff(self.grid) < 0):
            raise ValueError("grid must be ascending")

    def __call__(self, x):
        """Step-function CDF evaluated off the grid (left-continuous lookup)."""
        idx = np.searchsorted(self.grid, x, side="right") - 1
        return np.where(idx >= 0, self.cdf_values[np.clip(idx, 0, None)], 0.0)


def resolve_threads(threads: int | None = None) -> int:
    """Explicit value, else ``D2D_THREADS``, else 1."""
    if threads is None:
        threads = int(os.environ.get("D2D_THREADS", "1"))
    if threads < 1:
        raise ValueError("threads must be >= 1")
    return int(threads)


def _map_chunks(fn: Callable[[int, int], list], n: int, threads: int) -> list:
    bounds = [(i, min(i + _CHUNK, n)) for i in range(0, n, _CHUNK)]
    if threads == 1 or len(bounds) <= 1:
        parts = [fn(a, b) for a, b in bounds]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda ab: fn(*ab), bounds))
    out = []
    for part in parts:
        out.extend(part)
    return out


def run_trials(fn: Callable[[st.TrialStreams], object], n_trials: int, master_seed: int, threads: int | None = None) -> list:
    """``[fn(streams of trial i) for i in range(n_trials)]`` on a thread pool, in trial order."""
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    key = st.master_key(master_seed)

    def chunk(a, b):
        return [fn(st.TrialStreams(master_seed, i, key=key)) for i in range(a, b)]

    return _map_chunks(chunk, n_trials, resolve_threads(threads))


def aggregate(outcomes: Sequence[TrialOutcome]) -> CoverageEstimate:
    n = len(outcomes)
    if n == 0:
        raise ValueError("no outcomes")
    wins = sum(1 for o in outcomes if o.success)
    counts = {m: 0 for m in Mode}
    for o in outcomes:
        counts[o.mode] += 1
    cov = wins / n
    active = [o.snr_or_sinr for o in outcomes if o.mode is not Mode.ENERGY_OUTAGE]
    mean_snr = math.fsum(active) / len(active) if active else float("nan")
    return CoverageEstimate(
        coverage=cov,
        std_err=math.sqrt(cov * (1.0 - cov) / n),
        n_trials=n,
        mode_fractions={m: c / n for m, c in counts.items()},
        mean_conditional_snr=mean_snr,
    )


def _draws(p: SystemParams, n_trials: int, master_seed: int, threads, sampler: str) -> list[TrialDraw]:
    return run_trials(lambda ts: draw_trial(p, ts, sampler), n_trials, master_seed, threads)


def estimate_protocols(
    p: SystemParams,
    protocols: Sequence,
    n_trials: int,
    master_seed: int,
    threads: int | None = None,
    sampler: str = "alpha_gpp",
    fading_conventions: Sequence[bool] | None = None,
) -> dict:
    """Score several protocols on one shared set of trial draws.

    Keys are protocols; STP is scored once per entry of
    ``fading_conventions`` (default: the convention in ``p``) under the key
    ``(Protocol.STP, shared)``.
    """
    draws = _draws(p, n_trials, master_seed, threads, sampler)
    out = {}
    for proto in map(Protocol.parse, protocols):
        if proto is Protocol.STP and fading_conventions is not None:
            for shared in fading_conventions:
                q = p.replace(stp_shared_fading=bool(shared))
                out[(proto, bool(shared))] = aggregate([evaluate_trial(d, q, proto) for d in draws])
        else:
            out[proto] = aggregate([evaluate_trial(d, p, proto) for d in draws])
    return out


def estimate_coverage(
    p: SystemParams,
    protocol,
    n_trials: int,
    master_seed: int,
    threads: int | None = None,
    sampler: str = "alpha_gpp",
) -> CoverageEstimate:
    """Fraction of successful slots over ``n_trials`` independent trials."""
    proto = Protocol.parse(protocol)
    return estimate_protocols(p, [proto], n_trials, master_seed, threads, sampler)[proto]


def sample_incident_power(
    p: SystemParams, n_trials: int, seed: int, threads: int | None = None, sampler: str = "alpha_gpp"
) -> np.ndarray:
    """``n_trials`` independent draws of the incident power, in trial order."""
    return np.array(run_trials(lambda ts: draw_incident_power(p, ts, sampler), n_trials, seed, threads))


def empirical_pi_cdf(
    p: SystemParams, n_trials: int, seed: int, grid, threads: int | None = None, sampler: str = "alpha_gpp"
) -> EmpiricalCdf:
    grid = np.asarray(grid, dtype=float)
    samples = np.sort(sample_incident_power(p, n_trials, seed, threads, sampler))
    values = np.searchsorted(samples, grid, side="right") / samples.size
    return EmpiricalCdf(grid, values)


def sweep(
    base: SystemParams,
    axis: str,
    values: Sequence[float],
    protocols: Sequence,
    n_trials: int,
    seed: int,
    threads: int | None = None,
    sampler: str = "alpha_gpp",
) -> list[RunRecord]:
    """One Monte Carlo RunRecord per (value, protocol).

    Every value reuses the same trial-indexed streams (common random numbers).
    """
    if axis not in SWEEPABLE_FIELDS:
        raise KeyError(f"unknown sweep axis {axis!r}")
    records = []
    for v in values:
        p = base.replace(**{axis: float(v)})
        t0 = time.perf_counter()
        est = estimate_protocols(p, protocols, n_trials, seed, threads, sampler)
        ms = 1e3 * (time.perf_counter() - t0) / max(1, len(est))
        for proto, e in est.items():
            records.append(RunRecord.from_estimate(p, proto, e, seed, ms))
    return records
