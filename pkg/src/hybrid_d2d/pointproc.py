"""Radial samplers for the ambient transmitter fields.

Only distances to the window centre enter the incident power and the
aggregate interference, so a realization is stored as its set of radii.

The Ginibre sampler uses Kostlan's representation: the squared moduli of a
Ginibre process of intensity ``c`` are independent ``Gamma(k, 1/(pi c))``
variables, ``k = 1, 2, ...``. The alpha-Ginibre process with ``alpha = 1/j``
is the superposition of ``j`` independent Ginibre processes of the same
intensity, each independently thinned with retention ``alpha``; its Laplace
functional is ``Det(Id - alpha K)^(1/alpha)`` for the Ginibre kernel ``K``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "RadialPattern",
    "kostlan_truncation",
    "sample_ginibre_radii",
    "sample_alpha_gpp_radii",
    "sample_ppp_radii",
    "thin",
    "superposition_order",
]


@dataclass(frozen=True)
class RadialPattern:
    """Distances (m) of the points of one realization from the window centre."""

    radii: np.ndarray
    window_radius: float
    density: float = float("nan")
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        r = np.asarray(self.radii, dtype=float)
        if r.ndim != 1:
            raise ValueError("radii must be one-dimensional")
        if r.size and (r.min() <= 0 or r.max() > self.window_radius):
            raise ValueError("every radius must lie in (0, R]")
        object.__setattr__(self, "radii", r)

    @property
    def count(self) -> int:
        return int(self.radii.size)

    def __len__(self) -> int:
        return self.count

    def positions(self, rng: np.random.Generator) -> np.ndarray:
        """Planar coordinates with independent uniform angles.

        Exact for radial functionals only; angular correlations of the
        Ginibre field are not reproduced.
        """
        theta = rng.uniform(0.0, 2 * np.pi, self.count)
        return np.column_stack([self.radii * np.cos(theta), self.radii * np.sin(theta)])

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["k", "radius_m"])
            for k, r in enumerate(self.radii):
                w.writerow([k, repr(float(r))])


def kostlan_truncation(density: float, R: float) -> int:
    """Number of Kostlan moduli drawn on a disk of radius ``R``."""
    n = math.pi * density * R * R
    return int(math.ceil(n + 10.0 * math.sqrt(n) + 10.0))


def _empty(R: float, density: float) -> RadialPattern:
    return RadialPattern(np.empty(0), R, density)


def sample_ginibre_radii(density: float, R: float, rng: np.random.Generator) -> RadialPattern:
    if density < 0 or R <= 0:
        raise ValueError("density must be >= 0 and R > 0")
    if density == 0:
        return _empty(R, density)
    K = kostlan_truncation(density, R)
    g = rng.standard_gamma(np.arange(1.0, K + 1.0)) / (math.pi * density)
    g = g[(g <= R * R) & (g > 0)]
    return RadialPattern(np.sqrt(g), R, density)


def superposition_order(alpha: float) -> int:
    """Number of superposed Ginibre copies for repulsion ``alpha = 1/j``."""
    if not 0 < alpha <= 1:
        raise ValueError(f"alpha must be in (0, 1], got {alpha!r}")
    j = round(1.0 / alpha)
    if abs(j * alpha - 1.0) > 1e-9:
        raise ValueError(f"alpha-Ginibre sampling needs 1/alpha integer, got alpha={alpha!r}")
    return int(j)


def sample_alpha_gpp_radii(
    density: float,
    alpha: float,
    R: float,
    rng: np.random.Generator,
    thin_rng: np.random.Generator | None = None,
) -> RadialPattern:
    """alpha-Ginibre radii for ``alpha = 1/j``; intensity ``density`` on the disk.

    ``thin_rng`` (defaults to ``rng``) drives the per-copy retention draws so
    the base Ginibre copies can be shared between settings.
    """
    j = superposition_order(alpha)
    if j == 1:
        return sample_ginibre_radii(density, R, rng)
    thin_rng = rng if thin_rng is None else thin_rng
    parts = []
    for _ in range(j):
        base = sample_ginibre_radii(density, R, rng)
        parts.append(base.radii[thin_rng.random(base.count) < alpha])
    return RadialPattern(np.concatenate(parts), R, density)


def sample_ppp_radii(density: float, R: float, rng: np.random.Generator) -> RadialPattern:
    if density < 0 or R <= 0:
        raise ValueError("density must be >= 0 and R > 0")
    n = rng.poisson(density * math.pi * R * R)
    # 1 - U lies in (0, 1], keeping every radius strictly positive
    r = R * np.sqrt(1.0 - rng.random(n))
    return RadialPattern(r, R, density)


def thin(pattern: RadialPattern, p: float, rng: np.random.Generator) -> RadialPattern:
    """Keep each point independently with probability ``p``.

    One uniform is consumed per point whatever ``p`` is, so patterns thinned
    at different ``p`` from the same stream are nested.
    """
    if not 0 <= p <= 1:
        raise ValueError(f"p must be in [0, 1], got {p!r}")
    keep = rng.random(pattern.count) < p
    return RadialPattern(pattern.radii[keep], pattern.window_radius, pattern.density * p)
