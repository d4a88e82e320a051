"""Brute-force baselines for certifying the optimised solvers at small K.

Nothing here calls into the closed-form or SDP code paths: objectives and
rates are evaluated straight from the SNR definitions.
"""

from __future__ import annotations

from typing import Tuple

import numpy as np

from .channel import EffectiveChannels, SumPower, SystemConfig, rate_pair
from .errors import ParameterError

__all__ = ["grid_wsismin", "random_search_rate", "enumerate_rate_cloud", "feasible_samples"]

MAX_GRID_K = 3


def _co_phased_snr(x, eff: EffectiveChannels, cfg: SystemConfig):
    # with matched phases |f^T w| = sum |f_i| x_i
    x2 = x ** 2
    snr1 = cfg.p_s2 * (x @ np.abs(eff.f2)) ** 2 / (cfg.sigma_s1 + x2 @ eff.a1)
    snr2 = cfg.p_s1 * (x @ np.abs(eff.f1)) ** 2 / (cfg.sigma_s2 + x2 @ eff.a2)
    return snr1, snr2


def _objective(x, eff, cfg, mu):
    snr1, snr2 = _co_phased_snr(x, eff, cfg)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = mu / snr1 + (1.0 - mu) / snr2
    return np.where(np.isnan(val), np.inf, val)


def _sphere_directions(k: int, res: int) -> np.ndarray:
    """Nonnegative unit vectors on an angular grid with step (pi/2)/res."""
    t = 0.5 * np.pi * np.arange(res + 1) / res
    if k == 1:
        return np.ones((1, 1))
    if k == 2:
        return np.stack([np.cos(t), np.sin(t)], axis=1)
    th, ph = np.meshgrid(t, t, indexing="ij")
    return np.stack([np.cos(th), np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph)],
                    axis=-1).reshape(-1, 3)


def grid_wsismin(eff: EffectiveChannels, cfg: SystemConfig, mu: float,
                 resolution: int) -> Tuple[np.ndarray, float]:
    """Best co-phased amplitude vector on a grid over the feasible set.

    Sum power: directions on the nonnegative orthant scaled onto x^T D x = P_R.
    Per-relay limits: fractions alpha on the lattice {0, 1/res, ..., 1}^K.
    Grid steps halve when the resolution doubles, so grids are nested.
    """
    k = eff.k
    if k > MAX_GRID_K:
        raise ParameterError(f"grid oracle refuses K={k} > {MAX_GRID_K}")
    if resolution < 100:
        raise ParameterError("resolution must be at least 100")
    if isinstance(cfg.relay_constraint, SumPower):
        u = _sphere_directions(k, resolution)
        x = np.sqrt(cfg.relay_constraint.total) * u / np.sqrt(eff.d)
        obj = _objective(x, eff, cfg, mu)
        i = int(np.argmin(obj))
        return x[i], float(obj[i])

    scale = np.sqrt(cfg.relay_constraint.powers / eff.d)
    a = np.arange(resolution + 1) / resolution
    if k == 1:
        x = (a[1:] * scale[0])[:, None]
        obj = _objective(x, eff, cfg, mu)
        i = int(np.argmin(obj))
        return x[i], float(obj[i])
    # sweep the last axis, vectorise the rest
    lead = np.stack(np.meshgrid(*([a] * (k - 1)), indexing="ij"), axis=-1).reshape(-1, k - 1)
    lead = lead * scale[:-1]
    best, best_x = np.inf, None
    for al in a:
        x = np.concatenate([lead, np.full((lead.shape[0], 1), al * scale[-1])], axis=1)
        obj = _objective(x, eff, cfg, mu)
        i = int(np.argmin(obj))
        if obj[i] < best:
            best, best_x = float(obj[i]), x[i].copy()
    return best_x, best


def _directions(rng, n: int, k: int) -> np.ndarray:
    return rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))


def _to_boundary(W: np.ndarray, eff: EffectiveChannels, cfg: SystemConfig) -> np.ndarray:
    """Scale each row out to the edge of the power-feasible set."""
    pw = np.abs(W) ** 2
    if isinstance(cfg.relay_constraint, SumPower):
        load = pw @ eff.d / cfg.relay_constraint.total
    else:
        load = np.max(pw * eff.d / cfg.relay_constraint.powers, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(load > 0, 1.0 / np.sqrt(load), 0.0)
    return W * s[:, None]


def random_search_rate(eff: EffectiveChannels, cfg: SystemConfig, kappa: float,
                       samples: int, seed: int, chunk: int = 20_000) -> float:
    """Best rate-profile objective min(R1/kappa, R2/(1-kappa)) over random beams.

    Every candidate is feasible, so the result is an achievable lower bound;
    the search starts from w = 0 (value 0).
    """
    rng = np.random.default_rng(seed)
    best = 0.0
    done = 0
    while done < samples:
        n = min(chunk, samples - done)
        W = _to_boundary(_directions(rng, n, eff.k), eff, cfg)
        r1, r2 = rate_pair(W, eff, cfg)
        with np.errstate(divide="ignore"):
            v1 = r1 / kappa if kappa > 0 else np.inf
            v2 = r2 / (1.0 - kappa) if kappa < 1 else np.inf
        best = max(best, float(np.max(np.minimum(v1, v2))))
        done += n
    return best


def feasible_samples(eff: EffectiveChannels, cfg: SystemConfig, samples: int,
                     seed: int) -> np.ndarray:
    """Beam vectors drawn uniformly (by volume) from the power-feasible set."""
    rng = np.random.default_rng(seed)
    k = eff.k
    if isinstance(cfg.relay_constraint, SumPower):
        W = _to_boundary(_directions(rng, samples, k), eff, cfg)
        return W * rng.uniform(size=(samples, 1)) ** (1.0 / (2 * k))
    # uniform on each per-relay disk
    radius = np.sqrt(cfg.relay_constraint.powers / eff.d * rng.uniform(size=(samples, k)))
    return radius * np.exp(2j * np.pi * rng.uniform(size=(samples, k)))


def enumerate_rate_cloud(eff: EffectiveChannels, cfg: SystemConfig, samples: int,
                         seed: int) -> np.ndarray:
    """Rate pairs (n x 2) of random feasible beam vectors."""
    W = feasible_samples(eff, cfg, samples, seed)
    r1, r2 = rate_pair(W, eff, cfg)
    return np.column_stack([r1, r2])
