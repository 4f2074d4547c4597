"""Closed-form coverage machinery evaluated numerically.

The incident power ``P_I`` at the transmitter is a shot noise over an
alpha-Ginibre field. Its Laplace transform is a Fredholm determinant

    L(s) = Det(Id - alpha A(s))^(1/alpha),
    A(s) = sqrt(f_s) G sqrt(f_s),   f_s(r) = 1 - (1 + s P_A / (m r^mu))^(-m),

(repulsion ``alpha`` in (0, 1]; ``alpha -> 0`` recovers the Poisson case).
Its PDF/CDF follow by numerical inversion, and every coverage probability
is a one-dimensional integral against that PDF. The interference at the
receiver enters through the same determinant, evaluated at a real argument.
"""

from __future__ import annotations

import functools
import math
import warnings

import numpy as np
from scipy import integrate
from scipy.special import roots_legendre

from ..errors import QuadratureError, QuantileSearchError
from ..params import SystemParams, derived_thresholds
from .inversion import DEFAULT_INVERSION, InverseLaplaceConfig, bromwich_nodes, combine
from .spectral import radial_modes

__all__ = [
    "FieldTransform",
    "CoverageModel",
    "coverage_model",
    "laplace_pi",
    "ppp_laplace_pi",
    "cdf_pi",
    "pdf_pi",
    "prob_backscatter_ptp",
    "coverage_backscatter",
    "coverage_htt",
    "coverage_ptp",
    "coverage_stp",
    "stp_report",
    "ptp_report",
    "STP_VARIANTS",
    "PTP_VARIANTS",
    "MonotonicityWarning",
]

STP_VARIANTS = ("printed", "composed", "exact")
PTP_VARIANTS = ("exact", "printed")

_CHUNK = 4096
_TAIL_MASS = 1e-4
_LOW_MASS = 1e-10
_GL_NODES = 32
_LOG_BLOCK = 16


class MonotonicityWarning(UserWarning):
    pass


class FieldTransform:
    """Laplace transform of a shot noise ``power * sum h r^-mu`` over an alpha-GPP.

    ``density`` is the intensity of the Ginibre kernel and ``load`` scales the
    kernel (independent thinning); the field intensity is ``load * density``.
    """

    def __init__(self, power, density, load, R, mu, m, alpha):
        self.power, self.density, self.load = float(power), float(density), float(load)
        self.R, self.mu, self.m, self.alpha = float(R), float(mu), float(m), float(alpha)
        self.empty = self.density == 0 or self.load == 0
        if not self.empty:
            self.modes = radial_modes(self.density, self.R)
            self._rpow = self.power / (self.m * self.modes.r ** self.mu)

    def log_laplace(self, s) -> np.ndarray:
        s = np.asarray(s)
        if self.empty:
            return np.zeros(s.shape, dtype=complex)
        flat = s.reshape(-1).astype(complex)
        out = np.empty(flat.size, dtype=complex)
        a = self.alpha * self.load
        modes = self.modes
        base = (1.0 - a) + a * modes.q_complement
        for i in range(0, flat.size, _CHUNK):
            z = flat[i:i + _CHUNK, None] * self._rpow[None, :]
            comp = modes.project(self._complement(z))
            fac = base[None, :] + a * comp
            out[i:i + _CHUNK] = self._sum_log(fac) / self.alpha
        return out.reshape(s.shape)

    def _complement(self, z):
        """``(1 + z)^(-m)`` on the principal branch."""
        m = self.m
        if m == int(m) and m <= 8:
            inv = 1.0 / (1.0 + z)
            g = inv
            for _ in range(int(m) - 1):
                g = g * inv
            return g
        return (1.0 + z) ** (-m)

    def _sum_log(self, fac):
        """Row sums of per-factor principal logs.

        When ``1/alpha`` is an integer only the sum modulo 2 pi i matters, so
        blocks of factors are multiplied first (far fewer complex logs).
        Rows whose block products come near underflow take the slow path.
        """
        j = 1.0 / self.alpha
        if abs(j - round(j)) > 1e-12:
            return np.sum(np.log(fac), axis=1)
        n, K = fac.shape
        pad = (-K) % _LOG_BLOCK
        if pad:
            fac = np.concatenate([fac, np.ones((n, pad), dtype=fac.dtype)], axis=1)
        prod = fac.reshape(n, -1, _LOG_BLOCK).prod(axis=2)
        out = np.empty(n, dtype=complex)
        small = np.min(np.abs(prod), axis=1) < 1e-250
        out[~small] = np.sum(np.log(prod[~small]), axis=1)
        if np.any(small):
            out[small] = np.sum(np.log(fac[small]), axis=1)
        return out

    def laplace(self, s) -> np.ndarray:
        return np.exp(self.log_laplace(s))

    def ppp_laplace(self, s: float) -> float:
        """Poisson-field transform at real ``s >= 0`` by adaptive quadrature."""
        c = self.density * self.load
        if c == 0 or s == 0:
            return 1.0
        m, mu, P = self.m, self.mu, self.power

        def f(r):
            return -math.expm1(-m * math.log1p(s * P / (m * r**mu))) * r if r > 0 else 0.0

        knee = min((s * P / m) ** (1.0 / mu), self.R)
        pts = sorted({knee * x for x in (0.1, 1.0, 10.0) if 0 < knee * x < self.R})
        val, err = integrate.quad(f, 0.0, self.R, points=pts or None, limit=500, epsabs=1e-13, epsrel=1e-10)
        return math.exp(-2.0 * math.pi * c * val)


def _field_kernel(p: SystemParams, density: float, load: float) -> tuple[float, float]:
    if p.load_model == "kernel":
        return density * load, 1.0
    return density, load


class CoverageModel:
    """All analytic quantities for one parameter set, with shared caches."""

    def __init__(self, p: SystemParams, cfg: InverseLaplaceConfig = DEFAULT_INVERSION):
        self.p = p
        self.cfg = cfg
        self.thresholds = derived_thresholds(p)
        cA, lA = _field_kernel(p, p.zeta_A, p.l_A)
        cB, lB = _field_kernel(p, p.zeta_B, p.l_B)
        self.phi = FieldTransform(p.P_A, cA, lA, p.R, p.mu, p.m, p.alpha)
        self.psi = FieldTransform(p.P_B, cB, lB, p.R, p.mu, p.m, p.alpha)
        self._pdf_cache: dict[float, float] = {}
        self._upper = None
        self._lower = None
        self.diagnostics: dict = {}

    # -- distribution of the incident power ---------------------------------

    def _invert(self, rho, divide_by_s: bool, check: bool = True) -> np.ndarray:
        rho = np.atleast_1d(np.asarray(rho, dtype=float))
        if self.phi.empty:
            return np.ones_like(rho) if divide_by_s else np.zeros_like(rho)
        s = bromwich_nodes(rho, self.cfg)
        vals = self.phi.laplace(s)
        if divide_by_s:
            vals = vals / s
        return combine(vals, rho, self.cfg, check=check)

    def pdf(self, rho) -> np.ndarray:
        rho = np.atleast_1d(np.asarray(rho, dtype=float))
        missing = np.array(sorted({float(r) for r in rho if float(r) not in self._pdf_cache}))
        if missing.size:
            for r, v in zip(missing, self._invert(missing, False)):
                self._pdf_cache[float(r)] = float(v)
        return np.array([self._pdf_cache[float(r)] for r in rho])

    def cdf(self, rho, check: bool = True) -> np.ndarray:
        return self._invert(rho, True, check=check)

    def upper_limit(self) -> float:
        """Incident power above which at most ``_TAIL_MASS`` probability remains."""
        if self._upper is None:
            self._upper = self._quantile(1.0 - _TAIL_MASS, start=max(self.thresholds.pi_min_htt, 1e-6))
        return self._upper

    def lower_limit(self) -> float:
        """Incident power below which at most ``_LOW_MASS`` probability lies."""
        if self._lower is None:
            self._lower = self._quantile(_LOW_MASS, start=max(self.thresholds.pi_min_backscatter, 1e-9))
        return self._lower

    def _quantile(self, level: float, start: float, max_steps: int = 200) -> float:
        if self.phi.empty:
            return start
        F = lambda x: float(self.cdf([x], check=False)[0])  # noqa: E731
        lo = hi = start
        steps = 0
        if F(hi) < level:
            while F(hi) < level:
                lo, hi = hi, hi * 10.0
                steps += 1
                if steps > max_steps:
                    raise QuantileSearchError(f"no quantile {level} found below {hi:.3e}")
        else:
            while F(lo) >= level:
                hi, lo = lo, lo / 10.0
                steps += 1
                if steps > max_steps:
                    raise QuantileSearchError(f"no quantile {level} found above {lo:.3e}")
        # bisection in log scale until the bracket is within 1%
        while hi / lo > 1.01:
            mid = math.sqrt(lo * hi)
            if F(mid) >= level:
                hi = mid
            else:
                lo = mid
            steps += 1
            if steps > max_steps:
                raise QuantileSearchError(f"quantile {level} bisection did not converge")
        return hi

    # -- outer integrals -----------------------------------------------------

    def integrate(self, g, lo: float, hi: float | None = None, tail: bool = True) -> float:
        """``int_lo^hi g(rho) f_PI(rho) d rho`` on log-spaced Gauss-Legendre panels.

        With ``hi=None`` the integral runs to infinity: it is truncated at the
        upper limit and the remaining mass is added with ``g`` frozen at the
        cut (``g`` is bounded and increasing there for every use below).
        Panels are doubled until two levels agree to 1e-4 relative.
        """
        if self.phi.empty:
            return 0.0
        lo = max(lo, self.lower_limit())
        to_inf = hi is None
        if to_inf:
            hi = max(self.upper_limit(), 100.0 * lo)
        if not hi > lo:
            return 0.0
        prev = None
        for per_decade in (1, 2, 4, 8, 16):
            val = self._panels(g, lo, hi, per_decade)
            if prev is not None and abs(val - prev) <= 1e-4 * abs(val) + 1e-12:
                break
            prev = val
        else:
            raise QuadratureError("outer integral did not settle", abs(val - prev))
        if to_inf and tail:
            val += float(g(np.array([hi]))[0]) * (1.0 - float(self.cdf([hi])[0]))
        return float(val)

    def _panels(self, g, lo, hi, per_decade):
        a, b = math.log10(lo), math.log10(hi)
        inner = np.arange(math.floor(a * per_decade) + 1, math.ceil(b * per_decade)) / per_decade
        edges = np.concatenate([[a], inner[(inner > a) & (inner < b)], [b]])
        t, w = roots_legendre(_GL_NODES)
        half = 0.5 * np.diff(edges)
        x = (half[:, None] * t[None, :] + (0.5 * (edges[:-1] + edges[1:]))[:, None]).ravel()
        wx = (half[:, None] * w[None, :]).ravel()
        rho = 10.0 ** x
        return float(np.sum(wx * g(rho) * self.pdf(rho) * rho) * math.log(10.0))

    # -- link-level success probabilities given P_I = rho ---------------------

    def backscatter_success(self, rho):
        p = self.p
        x = p.tau_B * p.d ** p.mu * p.sigma2 / (p.delta * (1.0 - p.eta))
        return np.exp(-x / np.asarray(rho, dtype=float))

    def htt_success(self, rho):
        """P(SINR > tau_H | P_I = rho) for rho above the HTT threshold."""
        p = self.p
        rho = np.asarray(rho, dtype=float)
        excess = p.omega * p.beta * rho - p.rho_H
        out = np.zeros_like(rho)
        ok = excess > 0
        k = p.tau_H * p.d ** p.mu * (1.0 - p.omega) / excess[ok]
        out[ok] = np.exp(-k * p.sigma2) * self.psi.laplace(k).real
        return out

    # -- coverage -------------------------------------------------------------

    @functools.cached_property
    def C_B(self) -> float:
        return self.integrate(self.backscatter_success, self.thresholds.pi_min_backscatter)

    @functools.cached_property
    def C_H(self) -> float:
        return self.integrate(self.htt_success, self.thresholds.pi_min_htt)

    @functools.cached_property
    def B_PTP(self) -> float:
        t = self.thresholds.pi_min_htt
        return 0.0 if t <= 0 else _clip(float(self.cdf([t])[0]))

    def ptp(self, variant: str = "exact") -> float:
        if variant == "exact":
            tB, tH = self.thresholds.pi_min_backscatter, self.thresholds.pi_min_htt
            back = self.integrate(self.backscatter_success, tB, tH) if tH > tB else 0.0
            return _clip(back + self.C_H)
        if variant == "printed":
            return _clip(self.B_PTP * self.C_B + (1.0 - self.B_PTP) * self.C_H)
        raise ValueError(f"unknown PTP variant {variant!r}; expected one of {PTP_VARIANTS}")

    def stp(self, variant: str = "composed", shared_fading: bool | None = None) -> float:
        if variant == "composed":
            return _clip(self.C_B ** 2 + (1.0 - self.C_B) * self.C_H)
        if variant == "printed":
            below = self.integrate(self.backscatter_success, 0.0, self.thresholds.pi_min_backscatter)
            return _clip(self.C_H * self.C_B ** 2 + below)
        if variant == "exact":
            shared = self.p.stp_shared_fading if shared_fading is None else shared_fading
            tB = self.thresholds.pi_min_backscatter

            def probe_ok(rho):
                return np.where(rho > tB, self.backscatter_success(rho), 0.0)

            htt = self.integrate(lambda r: (1.0 - probe_ok(r)) * self.htt_success(r), self.thresholds.pi_min_htt)
            if shared:
                back = self.C_B
            else:
                back = self.integrate(lambda r: self.backscatter_success(r) ** 2, tB)
            return _clip(back + htt)
        raise ValueError(f"unknown STP variant {variant!r}; expected one of {STP_VARIANTS}")


def _clip(x: float) -> float:
    return float(min(1.0, max(0.0, x)))


@functools.lru_cache(maxsize=64)
def _cached_model(p: SystemParams, cfg: InverseLaplaceConfig) -> CoverageModel:
    return CoverageModel(p, cfg)


def coverage_model(p: SystemParams, cfg: InverseLaplaceConfig = DEFAULT_INVERSION) -> CoverageModel:
    """Shared evaluator for ``(p, cfg)``; repeated calls reuse its caches."""
    return _cached_model(p, cfg)


# -- public functional surface -------------------------------------------------


def laplace_pi(s, p: SystemParams):
    """Laplace transform of the incident power; ``Re(s) >= 0``."""
    s_arr = np.asarray(s)
    if np.any(np.real(s_arr) < 0):
        raise ValueError("Re(s) must be >= 0")
    out = coverage_model(p).phi.laplace(s_arr)
    return complex(out) if np.ndim(s) == 0 else out


def ppp_laplace_pi(s: float, p: SystemParams) -> float:
    """Poisson-field limit of :func:`laplace_pi` for real ``s >= 0``."""
    if s < 0:
        raise ValueError("s must be >= 0")
    return coverage_model(p).phi.ppp_laplace(float(s))


def cdf_pi(rho, p: SystemParams, cfg: InverseLaplaceConfig = DEFAULT_INVERSION):
    """CDF of the incident power, clipped to [0, 1].

    On an ascending grid the values are also made non-decreasing; a
    :class:`MonotonicityWarning` is issued if the raw inversion violated
    monotonicity by more than 1e-4.
    """
    scalar = np.ndim(rho) == 0
    r = np.atleast_1d(np.asarray(rho, dtype=float))
    if np.any(r <= 0):
        raise ValueError("rho must be > 0")
    raw = coverage_model(p, cfg).cdf(r)
    out = np.clip(raw, 0.0, 1.0)
    if r.size > 1 and np.all(np.diff(r) >= 0):
        fixed = np.maximum.accumulate(out)
        violation = float(np.max(fixed - out))
        if violation > 1e-4:
            warnings.warn(f"CDF inversion non-monotone by {violation:.2e}", MonotonicityWarning, stacklevel=2)
        out = fixed
    return float(out[0]) if scalar else out


def pdf_pi(rho, p: SystemParams, cfg: InverseLaplaceConfig = DEFAULT_INVERSION):
    scalar = np.ndim(rho) == 0
    r = np.atleast_1d(np.asarray(rho, dtype=float))
    if np.any(r <= 0):
        raise ValueError("rho must be > 0")
    out = coverage_model(p, cfg).pdf(r)
    return float(out[0]) if scalar else out


def prob_backscatter_ptp(p: SystemParams) -> float:
    """Probability that PTP picks backscattering: the CDF at the HTT threshold."""
    return coverage_model(p).B_PTP


def coverage_backscatter(p: SystemParams) -> float:
    return _clip(coverage_model(p).C_B)


def coverage_htt(p: SystemParams) -> float:
    return _clip(coverage_model(p).C_H)


def coverage_ptp(p: SystemParams, variant: str = "exact") -> float:
    """PTP coverage. ``"exact"`` conditions each mode on its own P_I region;
    ``"printed"`` is ``B_PTP C_B + (1 - B_PTP) C_H``."""
    return coverage_model(p).ptp(variant)


def coverage_stp(p: SystemParams, variant: str = "composed") -> float:
    """STP coverage.

    ``"composed"``: ``C_B^2 + (1 - C_B) C_H``; ``"printed"``:
    ``C_H C_B^2 + int_0^{rho_B/(beta eta)} exp(-x/rho) f(rho) d rho``;
    ``"exact"``: conditional on P_I, with the fading convention of
    ``p.stp_shared_fading``.
    """
    return coverage_model(p).stp(variant)


def ptp_report(p: SystemParams) -> dict:
    model = coverage_model(p)
    exact, printed = model.ptp("exact"), model.ptp("printed")
    return {"exact": exact, "printed": printed, "discrepancy": printed - exact, "B_PTP": model.B_PTP}


def stp_report(p: SystemParams) -> dict:
    """Every STP variant side by side, with the printed-vs-composed gap."""
    model = coverage_model(p)
    out = {v: model.stp(v) for v in ("printed", "composed")}
    out["exact_shared"] = model.stp("exact", shared_fading=True)
    out["exact_redrawn"] = model.stp("exact", shared_fading=False)
    out["discrepancy"] = out["printed"] - out["composed"]
    return out
