"""Link physics and mode selection for the hybrid transmitter."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import streams as st
from .channel import sample_nakagami_power
from .params import SystemParams
from .pointproc import RadialPattern, sample_alpha_gpp_radii, sample_ppp_radii, thin

__all__ = [
    "Mode",
    "Protocol",
    "TrialDraw",
    "TrialOutcome",
    "incident_power",
    "harvest_rate_backscatter",
    "harvest_rate_htt",
    "backscatter_snr",
    "htt_transmit_power",
    "aggregate_interference",
    "htt_sinr",
    "select_mode",
    "draw_incident_power",
    "draw_trial",
    "evaluate_trial",
    "simulate_trial",
]


class Mode(enum.Enum):
    BACKSCATTER = "backscatter"
    HTT = "htt"
    ENERGY_OUTAGE = "energy_outage"


class Protocol(enum.Enum):
    PTP = "ptp"
    STP = "stp"
    PURE_HTT = "pure_htt"
    PURE_BACKSCATTER = "pure_backscatter"

    @classmethod
    def parse(cls, value) -> "Protocol":
        if isinstance(value, cls):
            return value
        return cls(str(value).lower())


@dataclass(frozen=True)
class TrialOutcome:
    mode: Mode
    success: bool
    p_incident: float
    snr_or_sinr: float

    def __post_init__(self):
        if self.success and self.mode is Mode.ENERGY_OUTAGE:
            raise ValueError("an energy outage cannot be a success")


def _weighted_path_sum(pattern: RadialPattern, gains, power: float, mu: float) -> float:
    gains = np.asarray(gains, dtype=float)
    if gains.shape != (pattern.count,):
        raise ValueError(f"expected {pattern.count} gains, got {gains.shape}")
    if pattern.count == 0:
        return 0.0
    return float(power * np.sum(gains * pattern.radii ** (-mu)))


def incident_power(phi: RadialPattern, gains, P_A: float, mu: float) -> float:
    """RF power (W) arriving at the transmitter from the active ambient sources."""
    return _weighted_path_sum(phi, gains, P_A, mu)


def aggregate_interference(psi: RadialPattern, gains, P_B: float, mu: float) -> float:
    """Interference power (W) at the receiver."""
    return _weighted_path_sum(psi, gains, P_B, mu)


def harvest_rate_backscatter(P_I: float, beta: float, eta: float) -> float:
    return beta * eta * P_I


def harvest_rate_htt(P_I: float, omega: float, beta: float) -> float:
    return omega * beta * P_I


def backscatter_snr(P_I: float, h_SD: float, p: SystemParams) -> float:
    """SNR of the backscattered signal at the receiver; 0 if the circuit is unpowered."""
    if not harvest_rate_backscatter(P_I, p.beta, p.eta) > p.rho_B:
        return 0.0
    return p.delta * P_I * (1.0 - p.eta) * h_SD / (p.d ** p.mu * p.sigma2)


def htt_transmit_power(P_I: float, p: SystemParams) -> float:
    harvested = harvest_rate_htt(P_I, p.omega, p.beta)
    if not harvested > p.rho_H:
        return 0.0
    return (harvested - p.rho_H) / (1.0 - p.omega)


def htt_sinr(P_S: float, h_tilde: float, interference: float, p: SystemParams) -> float:
    if P_S <= 0:
        return 0.0
    return P_S * h_tilde * p.d ** (-p.mu) / (interference + p.sigma2)


def select_mode(protocol, P_I: float, attempt_snr: float | None, p: SystemParams) -> Mode:
    """Mode chosen by ``protocol``; EnergyOutage if that mode's circuit is unpowered.

    ``attempt_snr`` is the SNR of the trial backscatter transmission and is
    only consulted by STP (it is already 0 when the backscatter circuit
    could not start).
    """
    protocol = Protocol.parse(protocol)
    if protocol is Protocol.PTP:
        mode = Mode.BACKSCATTER if harvest_rate_htt(P_I, p.omega, p.beta) <= p.rho_H else Mode.HTT
    elif protocol is Protocol.STP:
        if attempt_snr is None:
            raise ValueError("STP needs the attempt SNR")
        mode = Mode.BACKSCATTER if attempt_snr > p.tau_B else Mode.HTT
    elif protocol is Protocol.PURE_HTT:
        mode = Mode.HTT
    else:
        mode = Mode.BACKSCATTER

    if mode is Mode.BACKSCATTER and not harvest_rate_backscatter(P_I, p.beta, p.eta) > p.rho_B:
        return Mode.ENERGY_OUTAGE
    if mode is Mode.HTT and not harvest_rate_htt(P_I, p.omega, p.beta) > p.rho_H:
        return Mode.ENERGY_OUTAGE
    return mode


@dataclass(frozen=True)
class TrialDraw:
    """All random quantities of one slot; protocols are evaluated on top of it.

    ``h_attempt`` is the backscatter link gain seen by the STP probe (and by
    every single-shot backscatter transmission); ``h_commit`` is the
    independent gain of the committed STP backscatter transmission.
    """

    p_incident: float
    interference: float
    h_attempt: float
    h_commit: float
    h_tilde: float


def _field(density, load, alpha, R, rng_base, rng_alpha, rng_load, model, sampler):
    if sampler == "ppp":
        def draw(c):
            return sample_ppp_radii(c, R, rng_base)
    else:
        def draw(c):
            return sample_alpha_gpp_radii(c, alpha, R, rng_base, thin_rng=rng_alpha)
    if model == "kernel":
        return draw(load * density)
    return thin(draw(density), load, rng_load)


def draw_incident_power(p: SystemParams, trial: st.TrialStreams, sampler: str = "alpha_gpp") -> float:
    """Incident power of one slot; uses only the energy-field substreams."""
    phi = _field(
        p.zeta_A, p.l_A, p.alpha, p.R,
        trial.stream(st.PHI_BASE), trial.stream(st.PHI_ALPHA), trial.stream(st.PHI_LOAD),
        p.load_model, sampler,
    )
    h_phi = sample_nakagami_power(p.m, phi.count, trial.stream(st.PHI_FADING))
    return incident_power(phi, h_phi, p.P_A, p.mu)


def draw_trial(p: SystemParams, trial: st.TrialStreams, sampler: str = "alpha_gpp") -> TrialDraw:
    """Sample both ambient fields, their fading and the link gains for one slot.

    ``sampler="ppp"`` replaces both fields by Poisson fields of the same
    intensity (the alpha -> 0 limit).
    """
    P_I = draw_incident_power(p, trial, sampler)

    psi = _field(
        p.zeta_B, p.l_B, p.alpha, p.R,
        trial.stream(st.PSI_BASE), trial.stream(st.PSI_ALPHA), trial.stream(st.PSI_LOAD),
        p.load_model, sampler,
    )
    h_psi = sample_nakagami_power(p.m, psi.count, trial.stream(st.PSI_FADING))
    interference = aggregate_interference(psi, h_psi, p.P_B, p.mu)

    h_attempt, h_commit, h_tilde = trial.stream(st.LINK_FADING).standard_exponential(3)
    return TrialDraw(P_I, interference, float(h_attempt), float(h_commit), float(h_tilde))


def evaluate_trial(draw: TrialDraw, p: SystemParams, protocol) -> TrialOutcome:
    protocol = Protocol.parse(protocol)
    P_I = draw.p_incident
    attempt = backscatter_snr(P_I, draw.h_attempt, p)
    mode = select_mode(protocol, P_I, attempt, p)

    if mode is Mode.ENERGY_OUTAGE:
        return TrialOutcome(mode, False, P_I, 0.0)
    if mode is Mode.HTT:
        sinr = htt_sinr(htt_transmit_power(P_I, p), draw.h_tilde, draw.interference, p)
        return TrialOutcome(mode, sinr > p.tau_H, P_I, sinr)
    if protocol is Protocol.STP and not p.stp_shared_fading:
        snr = backscatter_snr(P_I, draw.h_commit, p)
    else:
        snr = attempt
    return TrialOutcome(mode, snr > p.tau_B, P_I, snr)


def simulate_trial(p: SystemParams, protocol, rng, sampler: str = "alpha_gpp") -> TrialOutcome:
    """One slot end to end. ``rng`` is a TrialStreams or a numpy Generator."""
    if isinstance(rng, np.random.Generator):
        rng = st.TrialStreams.from_generator(rng)
    return evaluate_trial(draw_trial(p, rng, sampler), p, protocol)
