"""Small-scale fading, drawn directly as power gains."""

from __future__ import annotations

import numpy as np


def sample_nakagami_power(m: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` i.i.d. unit-mean Gamma(m, 1/m) power gains (Nakagami-m amplitude)."""
    if m < 0.5:
        raise ValueError(f"Nakagami shape must be >= 0.5, got {m!r}")
    if n < 0:
        raise ValueError("n must be >= 0")
    return rng.standard_gamma(m, n) / m


def sample_rayleigh_power(rng: np.random.Generator) -> float:
    """One Exp(1) power gain."""
    return float(rng.standard_exponential())
