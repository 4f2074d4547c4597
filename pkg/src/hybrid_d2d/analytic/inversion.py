"""Numerical Laplace inversion by Euler-summed Bromwich trapezoid sums.

The Bromwich integral is discretized with step pi/t along Re(s) = A/(2t)
(discretization error about exp(-A) f(3t)), the resulting alternating
series is summed to ``terms`` terms and then binomially averaged over
``euler_depth`` further partial sums. Every node has positive real part, so
transforms with a branch cut on the negative axis are never evaluated near it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import comb

from ..errors import InversionDivergence

__all__ = ["InverseLaplaceConfig", "DEFAULT_INVERSION", "bromwich_nodes", "combine", "inverse_laplace"]


@dataclass(frozen=True)
class InverseLaplaceConfig:
    terms: int = 32
    A: float = 18.5
    euler_depth: int = 32
    # relative size of the Euler-step change that counts as divergence
    divergence_tol: float = 1e-3

    def __post_init__(self):
        if self.terms < 8:
            raise ValueError("terms must be >= 8")
        if not self.A > 0:
            raise ValueError("A must be > 0")
        if self.euler_depth < 1:
            raise ValueError("euler_depth must be >= 1")

    @property
    def n_nodes(self) -> int:
        return self.terms + self.euler_depth + 1


DEFAULT_INVERSION = InverseLaplaceConfig()


def _weights(n: int, m: int) -> np.ndarray:
    """Coefficient of term k in the Euler average of partial sums s_n..s_{n+m}."""
    binom = comb(m, np.arange(m + 1)) / 2.0**m
    tail = np.cumsum(binom[::-1])[::-1]  # tail[i] = sum_{j>=i} binom[j]
    w = np.ones(n + m + 1)
    w[n + 1:] = tail[1:]
    k = np.arange(n + m + 1)
    w = w * (-1.0) ** k
    w[0] *= 0.5
    return w


def bromwich_nodes(t, cfg: InverseLaplaceConfig = DEFAULT_INVERSION) -> np.ndarray:
    """Nodes ``(A + 2 pi i k) / (2 t)``, shape (len(t), n_nodes)."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    k = np.arange(cfg.n_nodes)
    return (cfg.A + 2j * math.pi * k)[None, :] / (2.0 * t[:, None])


def combine(values: np.ndarray, t, cfg: InverseLaplaceConfig = DEFAULT_INVERSION, check: bool = True) -> np.ndarray:
    """Turn transform values at :func:`bromwich_nodes` into ``f(t)``."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    re = np.real(values)
    scale = math.exp(cfg.A / 2.0) / t
    n, m = cfg.terms, cfg.euler_depth
    est = scale * (re @ _weights(n, m))
    if check:
        if not np.all(np.isfinite(est)):
            raise InversionDivergence("non-finite inverse transform")
        # same Euler average started one partial sum earlier
        prev = scale * (re[:, : n + m] @ _weights(n - 1, m))
        noise = 1e-9 * scale * np.max(np.abs(values), axis=1)
        change = np.abs(est - prev)
        bad = change > cfg.divergence_tol * np.abs(est) + noise
        if np.any(bad):
            i = int(np.argmax(bad))
            raise InversionDivergence(
                f"Euler partial sums oscillate at t={t[i]:.4g}: step change {change[i]:.3e} vs value {est[i]:.3e}"
            )
    return est


def inverse_laplace(F, t, cfg: InverseLaplaceConfig = DEFAULT_INVERSION, check: bool = True):
    """``f(t)`` from its transform ``F``; ``F`` must accept complex arrays.

    ``t`` may be a scalar or an array of positive reals.
    """
    scalar = np.ndim(t) == 0
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t_arr <= 0):
        raise ValueError("t must be > 0")
    s = bromwich_nodes(t_arr, cfg)
    values = np.asarray(F(s), dtype=complex).reshape(s.shape)
    out = combine(values, t_arr, cfg, check=check)
    return float(out[0]) if scalar else out
