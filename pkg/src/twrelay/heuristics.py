"""Low-complexity beamformers that need only local channel knowledge."""

from __future__ import annotations

import numpy as np

from .channel import ChannelRealization, Individual, SumPower, SystemConfig
from .errors import ContractViolation

__all__ = ["equal_power", "max_power", "greedy_phase", "relay_phases"]


def _d(ch: ChannelRealization, cfg: SystemConfig) -> np.ndarray:
    return (np.abs(ch.h1) ** 2 * cfg.p_s1 + np.abs(ch.h2) ** 2 * cfg.p_s2
            + cfg.relay_noise(ch.k))


def greedy_phase(ch: ChannelRealization, cfg: SystemConfig, amplitudes) -> np.ndarray:
    """Each relay co-phases whichever single link it helps more.

    The S1-side candidate aligns h2 * h1r (the S2 -> S1 link), the S2-side
    candidate aligns h1 * h2r. Ties go to the S1 side.
    """
    x = np.asarray(amplitudes, dtype=float)
    sigma = cfg.relay_noise(ch.k)
    x2 = x ** 2
    s1_side = x2 * cfg.p_s2 * np.abs(ch.h2 * ch.h1r) ** 2 / (
        cfg.sigma_s1 + x2 * np.abs(ch.h1r) ** 2 * sigma)
    s2_side = x2 * cfg.p_s1 * np.abs(ch.h1 * ch.h2r) ** 2 / (
        cfg.sigma_s2 + x2 * np.abs(ch.h2r) ** 2 * sigma)
    theta = np.where(s1_side >= s2_side,
                     -(np.angle(ch.h2) + np.angle(ch.h1r)),
                     -(np.angle(ch.h1) + np.angle(ch.h2r)))
    return x * np.exp(1j * theta)


def relay_phases(ch: ChannelRealization, cfg: SystemConfig, amplitudes) -> np.ndarray:
    if ch.reciprocal:
        return np.asarray(amplitudes) * np.exp(-1j * (np.angle(ch.h1) + np.angle(ch.h2)))
    return greedy_phase(ch, cfg, amplitudes)


def equal_power(ch: ChannelRealization, cfg: SystemConfig) -> np.ndarray:
    """Every relay spends P_R / K."""
    if not isinstance(cfg.relay_constraint, SumPower):
        raise ContractViolation("equal-power beamforming needs a sum-power budget")
    x = np.sqrt(cfg.relay_constraint.total / (ch.k * _d(ch, cfg)))
    return relay_phases(ch, cfg, x)


def max_power(ch: ChannelRealization, cfg: SystemConfig) -> np.ndarray:
    """Every relay spends its full individual budget."""
    if not isinstance(cfg.relay_constraint, Individual):
        raise ContractViolation("max-power beamforming needs per-relay budgets")
    cfg.check(ch.k)
    x = np.sqrt(cfg.relay_constraint.powers / _d(ch, cfg))
    return relay_phases(ch, cfg, x)
