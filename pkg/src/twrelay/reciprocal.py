"""Closed-form weighted sum inverse-SNR minimisation for reciprocal channels.

With h^r = h the relay phases can be matched to both links at once, so only
the amplitudes x_i = |w_i| are optimised. For a weight ``mu`` the solvers
minimise ``mu / SNR1 + (1 - mu) / SNR2`` under either a sum-power or
per-relay power constraint.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import (
    ChannelRealization,
    EffectiveChannels,
    Individual,
    SumPower,
    SystemConfig,
)
from .errors import ContractViolation, DegenerateChannelError, ParameterError

__all__ = [
    "WsisWeight",
    "SumPowerSolution",
    "IndividualSolution",
    "phase_align",
    "wsis_objective",
    "wsismin_sum_power",
    "wsismin_individual",
    "local_weight_sum_power",
    "local_weight_individual",
    "beam_from_amplitudes",
]


@dataclass(frozen=True)
class WsisWeight:
    mu: float

    def __post_init__(self):
        if not 0.0 <= self.mu <= 1.0:
            raise ParameterError("mu must lie in [0, 1]")

    @property
    def mu_bar(self) -> float:
        return 1.0 - self.mu


def _weight(mu) -> WsisWeight:
    return mu if isinstance(mu, WsisWeight) else WsisWeight(float(mu))


def _wrap(theta):
    # map to (-pi, pi]
    return np.pi - np.mod(np.pi - theta, 2 * np.pi)


def phase_align(ch: ChannelRealization) -> np.ndarray:
    """Relay phases -(angle h1 + angle h2) that co-phase both links."""
    if not ch.reciprocal:
        raise ContractViolation("phase_align requires reciprocal channels")
    return _wrap(-(np.angle(ch.h1) + np.angle(ch.h2)))


def beam_from_amplitudes(x, ch: ChannelRealization) -> np.ndarray:
    return np.asarray(x, dtype=float) * np.exp(1j * phase_align(ch))


def _nu(cfg: SystemConfig, w: WsisWeight) -> float:
    return w.mu * cfg.sigma_s1 / cfg.p_s2 + w.mu_bar * cfg.sigma_s2 / cfg.p_s1


def wsis_objective(x, eff: EffectiveChannels, cfg: SystemConfig, mu) -> np.ndarray:
    """Weighted inverse-SNR sum for amplitude vector(s) ``x`` (last axis K)."""
    w = _weight(mu)
    x = np.asarray(x, dtype=float)
    s = (x @ eff.f_hat) ** 2
    n1 = (cfg.sigma_s1 + (x ** 2) @ eff.a1) / cfg.p_s2
    n2 = (cfg.sigma_s2 + (x ** 2) @ eff.a2) / cfg.p_s1
    with np.errstate(divide="ignore"):
        return (w.mu * n1 + w.mu_bar * n2) / s


def _require_reciprocal(eff: EffectiveChannels) -> np.ndarray:
    if eff.f_hat is None:
        raise ContractViolation("closed-form solvers need reciprocal effective channels")
    if not np.any(eff.f_hat > 0):
        raise DegenerateChannelError("|h1||h2| vanishes on every relay")
    return eff.f_hat


@dataclass(frozen=True)
class SumPowerSolution:
    x: np.ndarray
    xi: float
    gamma_diag: np.ndarray
    broadcast: float
    nu: float


def _gamma_diag(eff: EffectiveChannels, cfg: SystemConfig, w: WsisWeight, p_r: float):
    nu = _nu(cfg, w)
    beta = eff.d
    # |h_k|^2 sigma_i^2 == a_k in the reciprocal case
    eta = w.mu * eff.a1 / cfg.p_s2 + w.mu_bar * eff.a2 / cfg.p_s1
    return nu * beta / p_r + eta, nu


def wsismin_sum_power(eff: EffectiveChannels, cfg: SystemConfig, mu) -> SumPowerSolution:
    """Optimal amplitudes under ``x^T D x <= P_R``.

    The optimum sits on the power boundary and maximises a generalised
    Rayleigh quotient with a diagonal denominator, giving x* ∝ Γ^{-1} f̂.
    """
    if not isinstance(cfg.relay_constraint, SumPower):
        raise ContractViolation("sum-power solver called with individual constraints")
    f_hat = _require_reciprocal(eff)
    w = _weight(mu)
    p_r = cfg.relay_constraint.total
    gamma, nu = _gamma_diag(eff, cfg, w, p_r)
    direction = f_hat / gamma
    norm = np.linalg.norm(direction)
    unit = direction / norm
    xi = np.sqrt(p_r / (unit @ (eff.d * unit)))
    return SumPowerSolution(x=xi * unit, xi=float(xi), gamma_diag=gamma,
                            broadcast=float(xi / norm), nu=float(nu))


def local_weight_sum_power(h1i: complex, h2i: complex, sigma_i: float, cfg: SystemConfig,
                           mu, broadcast: float) -> complex:
    """Relay-side weight from local channels plus the broadcast scalar."""
    w = _weight(mu)
    p_r = cfg.relay_constraint.total
    g1, g2 = abs(h1i) ** 2, abs(h2i) ** 2
    beta = sigma_i + cfg.p_s1 * g1 + cfg.p_s2 * g2
    eta = sigma_i * (g1 * w.mu / cfg.p_s2 + g2 * w.mu_bar / cfg.p_s1)
    amp = broadcast * abs(h1i) * abs(h2i) / (_nu(cfg, w) * beta / p_r + eta)
    return complex(amp * np.exp(-1j * (np.angle(h1i) + np.angle(h2i))))


@dataclass(frozen=True)
class IndividualSolution:
    alpha: np.ndarray
    k_star: int
    lambda_star: float
    tau: np.ndarray
    psi: np.ndarray
    g_tilde: np.ndarray
    phi: np.ndarray
    lambdas: np.ndarray

    def amplitudes(self, eff: EffectiveChannels, cfg: SystemConfig) -> np.ndarray:
        p = cfg.relay_constraint.powers
        return self.alpha * np.sqrt(p / eff.d)


def _psi_g(eff: EffectiveChannels, cfg: SystemConfig, w: WsisWeight):
    p = cfg.relay_constraint.powers
    nu = _nu(cfg, w)
    # H1 = diag(sigma_i p_i |h1_i|^2) = p * a1 when channels are reciprocal
    h1, h2 = p * eff.a1, p * eff.a2
    psi = np.sqrt((h1 * w.mu / cfg.p_s2 + h2 * w.mu_bar / cfg.p_s1) / eff.d / nu)
    g = np.sqrt(p) * eff.f_hat / np.sqrt(eff.d)
    return psi, g / np.sqrt(nu)


def _phi(psi, g_tilde):
    phi = np.zeros_like(g_tilde)
    live = g_tilde > 0
    phi[live] = g_tilde[live] / psi[live] ** 2
    return phi


def wsismin_individual(eff: EffectiveChannels, cfg: SystemConfig, mu) -> IndividualSolution:
    """Optimal power fractions under per-relay limits.

    Relays are ranked by φ_i = g̃_i / ψ_i²; the first k* run at full power and
    the rest at the fraction λ_{k*} φ_i, with k* the first index whose λ_k
    drops below the next relay's 1/φ.
    """
    if not isinstance(cfg.relay_constraint, Individual):
        raise ContractViolation("individual solver called with a sum-power constraint")
    cfg.check(eff.k)
    _require_reciprocal(eff)
    w = _weight(mu)
    psi, g_tilde = _psi_g(eff, cfg, w)
    phi = _phi(psi, g_tilde)
    if not np.any(phi > 0):
        raise DegenerateChannelError("every relay has phi = 0")
    # stable sort on -phi keeps ascending index order among ties
    tau = np.argsort(-phi, kind="stable")
    phi_ext = np.append(phi[tau], 0.0)
    num = 1.0 + np.cumsum(psi[tau] ** 2)
    # fixed point of alpha = lambda * phi on the partial set; the sum is of g~, not g~^2
    den = np.cumsum(g_tilde[tau])
    with np.errstate(divide="ignore", invalid="ignore"):
        lambdas = np.where(den > 0, num / den, np.inf)
        inv_next = np.where(phi_ext[1:] > 0, 1.0 / phi_ext[1:], np.inf)
    hits = np.nonzero(lambdas < inv_next)[0]
    k_star = int(hits[0]) + 1
    lam = float(lambdas[k_star - 1])
    alpha = lam * phi
    alpha[tau[:k_star]] = 1.0
    return IndividualSolution(alpha=alpha, k_star=k_star, lambda_star=lam, tau=tau,
                              psi=psi, g_tilde=g_tilde, phi=phi, lambdas=lambdas)


def local_weight_individual(h1i: complex, h2i: complex, sigma_i: float, p_i: float,
                            cfg: SystemConfig, mu, lambda_star: float) -> complex:
    """Relay-side weight from local channels and the broadcast λ_{k*}."""
    w = _weight(mu)
    nu = _nu(cfg, w)
    g1, g2 = abs(h1i) ** 2, abs(h2i) ** 2
    d_i = sigma_i + cfg.p_s1 * g1 + cfg.p_s2 * g2
    psi2 = p_i * sigma_i * (g1 * w.mu / cfg.p_s2 + g2 * w.mu_bar / cfg.p_s1) / d_i / nu
    g_tilde = np.sqrt(p_i) * abs(h1i) * abs(h2i) / np.sqrt(d_i) / np.sqrt(nu)
    if g_tilde == 0:
        alpha = 0.0
    else:
        phi = g_tilde / psi2
        alpha = 1.0 if 1.0 / phi <= lambda_star else lambda_star * phi
    amp = alpha * np.sqrt(p_i / d_i)
    return complex(amp * np.exp(-1j * (np.angle(h1i) + np.angle(h2i))))
