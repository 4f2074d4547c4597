"""Spectral evaluation of radially modulated Ginibre kernels on a disk.

For a kernel ``sqrt(f) G sqrt(f)`` with ``G`` the Ginibre kernel of intensity
``c`` and ``f`` a function of the distance to the centre only, the angular
modes ``z^k`` are eigenfunctions. The k-th eigenvalue is

    lambda_k = int_0^R f(r) w_k(r) dr,
    w_k(r) = 2 pi c r (pi c r^2)^k exp(-pi c r^2) / k!,

i.e. the average of ``f`` under the radial law of the k-th Kostlan modulus.
Fredholm determinants then reduce to products over modes.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammainc, gammaincc, gammaln

from ..errors import NearSingularDeterminant, QuadratureError

__all__ = [
    "mode_truncation",
    "mode_weight",
    "mode_eigenvalue",
    "RadialModes",
    "radial_modes",
    "SpectralOperator",
    "fredholm_det_alpha",
    "log_fredholm_det_alpha",
]

_GL_ORDER = 16
# panel-weight products below this are dropped from the banded mode blocks
_BAND_CUTOFF = 1e-18
_BLOCK = 32


def mode_truncation(density: float, R: float) -> int:
    u = math.pi * density * R * R
    return int(math.ceil(u) + math.ceil(10.0 * math.sqrt(u)) + 16)


def mode_weight(k, density: float, r):
    """Radial density ``w_k(r)`` of the k-th Kostlan modulus (integrates to 1 on [0, inf))."""
    r = np.asarray(r, dtype=float)
    k = np.asarray(k)
    x = math.pi * density * r * r
    with np.errstate(divide="ignore", invalid="ignore"):
        logw = np.log(2 * math.pi * density * r) + k * np.log(x) - x - gammaln(k + 1.0)
        return np.where(r > 0, np.exp(logw), 0.0)


def _gl(n):
    return np.polynomial.legendre.leggauss(n)


def _panel_rule(a, b, n):
    t, w = _gl(n)
    half = 0.5 * (b - a)
    return half * t + 0.5 * (a + b), half * w


def mode_eigenvalue(f, density: float, R: float, k: int, tol: float = 1e-12, max_depth: int = 40) -> complex:
    """``lambda_k`` for the modulation ``f`` by adaptive Gauss-Legendre in r.

    ``f`` must accept a numpy array of radii. Panels are bisected until the
    15- and 31-point rules agree to ``tol`` scaled by the panel's share of
    the window.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    if density <= 0:
        return 0.0 + 0.0j
    sigma = 1.0 / (2.0 * math.sqrt(math.pi * density))
    n0 = max(8, int(math.ceil(R / (2.0 * sigma))))
    edges = np.linspace(0.0, R, n0 + 1)

    def rule(a, b, n):
        x, w = _panel_rule(a, b, n)
        return np.sum(w * np.asarray(f(x), dtype=complex) * mode_weight(k, density, x))

    total = 0.0 + 0.0j
    unresolved = 0.0
    stack = [(a, b, 0) for a, b in zip(edges[:-1], edges[1:])]
    while stack:
        a, b, depth = stack.pop()
        coarse, fine = rule(a, b, 15), rule(a, b, 31)
        err = abs(fine - coarse)
        if err <= tol * (b - a) / R:
            total += fine
        elif depth >= max_depth:
            total += fine
            unresolved += err
        else:
            mid = 0.5 * (a + b)
            stack.append((a, mid, depth + 1))
            stack.append((mid, b, depth + 1))
    if unresolved > tol:
        raise QuadratureError(f"mode {k} eigenvalue did not converge", unresolved)
    return complex(total)


class RadialModes:
    """Composite Gauss-Legendre rule on [0, R] with banded mode weights.

    ``blocks`` holds, for consecutive groups of modes, the node range where
    their weights are non-negligible and the matrix of ``w_k(r_j) W_j``.
    """

    def __init__(self, density: float, R: float):
        if density <= 0 or R <= 0:
            raise ValueError("density and R must be positive")
        self.density = float(density)
        self.R = float(R)
        self.K = mode_truncation(density, R)
        u = math.pi * density * R * R
        k = np.arange(self.K)
        self.q = gammainc(k + 1.0, u)
        self.q_complement = gammaincc(k + 1.0, u)

        tail = gammainc(np.arange(self.K, self.K + 200) + 1.0, u).sum()
        if tail >= 1e-10:
            raise AssertionError(f"mode truncation tail {tail:.2e} too large")

        sigma = 1.0 / (2.0 * math.sqrt(math.pi * density))
        h = min(2.0 * sigma, 2.0, R / 4.0)
        r0 = R * 1e-6
        n_geo = max(1, int(math.ceil(4 * math.log10(h / r0))))
        edges = np.concatenate([[0.0], np.geomspace(r0, h, n_geo + 1), np.arange(2 * h, R, h), [R]])
        edges = np.unique(edges[edges <= R])
        xs, ws = zip(*(_panel_rule(a, b, _GL_ORDER) for a, b in zip(edges[:-1], edges[1:])))
        self.r = np.concatenate(xs)
        self.weights = np.concatenate(ws)

        self.blocks = []
        for k0 in range(0, self.K, _BLOCK):
            k1 = min(k0 + _BLOCK, self.K)
            W = mode_weight(np.arange(k0, k1)[:, None], density, self.r[None, :]) * self.weights
            cols = np.nonzero(W.max(axis=0) > _BAND_CUTOFF)[0]
            if cols.size == 0:
                continue
            j0, j1 = int(cols[0]), int(cols[-1]) + 1
            self.blocks.append((k0, k1, j0, j1, np.ascontiguousarray(W[:, j0:j1].T)))
        # rescale each mode so that the rule integrates f = 1 to q_k exactly
        raw = self._project(np.ones((1, self.n_nodes)))[0]
        self._scale = np.where(raw > 0, self.q / np.where(raw > 0, raw, 1.0), 1.0)

    @property
    def n_nodes(self) -> int:
        return self.r.size

    def project(self, values: np.ndarray) -> np.ndarray:
        """``int values(r) w_k(r) dr`` for every mode.

        ``values`` has shape (..., n_nodes) (real or complex); the result has
        shape (..., K).
        """
        return self._project(values) * self._scale

    def _project(self, values) -> np.ndarray:
        values = np.asarray(values)
        lead = values.shape[:-1]
        v = values.reshape(-1, self.n_nodes)
        is_complex = np.iscomplexobj(v)
        stacked = np.concatenate([v.real, v.imag], axis=0) if is_complex else v
        out = np.zeros((stacked.shape[0], self.K))
        for k0, k1, j0, j1, Wt in self.blocks:
            out[:, k0:k1] = stacked[:, j0:j1] @ Wt
        if is_complex:
            n = v.shape[0]
            out = out[:n] + 1j * out[n:]
        return out.reshape(lead + (self.K,))


@functools.lru_cache(maxsize=16)
def radial_modes(density: float, R: float) -> RadialModes:
    return RadialModes(density, R)


@dataclass(frozen=True)
class SpectralOperator:
    """Truncated mode eigenvalues of ``sqrt(f) G sqrt(f)`` on the disk.

    When built from the complement ``1 - f`` the operator also keeps
    ``complement_k = q_k - lambda_k`` so that factors ``1 - lambda_k`` close to
    zero are formed without cancellation.
    """

    eigenvalues: np.ndarray
    density: float
    window_radius: float
    q: np.ndarray | None = None
    q_complement: np.ndarray | None = None
    complement: np.ndarray | None = None

    @property
    def truncation(self) -> int:
        return int(np.size(self.eigenvalues))

    @classmethod
    def from_modulation(cls, f, density: float, R: float) -> "SpectralOperator":
        if density == 0:
            return cls(np.zeros(0, dtype=complex), 0.0, R)
        modes = radial_modes(float(density), float(R))
        lam = modes.project(np.asarray(f(modes.r), dtype=complex))
        return cls(lam, density, R)

    @classmethod
    def from_complement(cls, g, density: float, R: float) -> "SpectralOperator":
        """Operator for the modulation ``1 - g``."""
        if density == 0:
            return cls(np.zeros(0, dtype=complex), 0.0, R)
        modes = radial_modes(float(density), float(R))
        comp = modes.project(np.asarray(g(modes.r), dtype=complex))
        return cls(modes.q - comp, density, R, modes.q, modes.q_complement, comp)

    def factors(self, alpha: float) -> np.ndarray:
        """``1 + alpha * lambda_k``."""
        if self.complement is None:
            return 1.0 + alpha * self.eigenvalues
        if alpha < 0:
            base = (1.0 + alpha) + (-alpha) * self.q_complement
        else:
            base = 1.0 + alpha * self.q
        return base - alpha * self.complement


def log_fredholm_det_alpha(op: SpectralOperator, alpha: float) -> complex:
    """``log Det(Id + alpha A)^(-1/alpha)`` (principal logarithm per factor)."""
    if alpha == 0:
        raise ValueError("alpha must be non-zero; the alpha -> 0 limit is exp(-trace)")
    fac = op.factors(alpha)
    if fac.size == 0:
        return 0.0 + 0.0j
    smallest = np.min(np.abs(fac))
    if smallest < 1e-12:
        raise NearSingularDeterminant(f"|1 + alpha*lambda_k| = {smallest:.3e} < 1e-12")
    return complex(-np.sum(np.log(fac.astype(complex))) / alpha)


def fredholm_det_alpha(op: SpectralOperator, alpha: float) -> complex:
    """``Det(Id + alpha A)^(-1/alpha) = prod_k (1 + alpha lambda_k)^(-1/alpha)``.

    Negative ``alpha`` gives the repulsive (determinantal) family; ``alpha = -1``
    is ``Det(Id - A)``, the Ginibre Laplace functional.
    """
    return complex(np.exp(log_fredholm_det_alpha(op, alpha)))
