"""Signal model of the two-way amplify-and-forward relay cluster.

Two single-antenna sources exchange data through K single-antenna relays in
two slots. Relay ``i`` receives ``t_i = h1_i s1 + h2_i s2 + v_i``, scales it by
``w_i`` and broadcasts; each source removes its own (known) contribution.

All powers are linear (watts relative to unit noise).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

import numpy as np

from .errors import DimensionError, ParameterError

__all__ = [
    "ChannelRealization",
    "SumPower",
    "Individual",
    "SystemConfig",
    "EffectiveChannels",
    "effective_channels",
    "snr_pair",
    "rate_pair",
    "snr_to_rate",
    "relay_powers",
    "simulate_link",
]


def _frozen(a, dtype) -> np.ndarray:
    out = np.array(a, dtype=dtype).reshape(-1)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class ChannelRealization:
    """Forward (source to relay) and backward (relay to source) channels."""

    h1: np.ndarray
    h2: np.ndarray
    h1r: np.ndarray
    h2r: np.ndarray
    reciprocal: bool = False

    def __post_init__(self):
        for name in ("h1", "h2", "h1r", "h2r"):
            object.__setattr__(self, name, _frozen(getattr(self, name), complex))
        k = self.h1.size
        if k < 1 or any(getattr(self, n).size != k for n in ("h2", "h1r", "h2r")):
            raise DimensionError("all four channel vectors must share a length K >= 1")
        if self.reciprocal and not (
            np.array_equal(self.h1, self.h1r) and np.array_equal(self.h2, self.h2r)
        ):
            raise ParameterError("reciprocal channels require h1r == h1 and h2r == h2")

    @classmethod
    def from_forward(cls, h1, h2) -> "ChannelRealization":
        """Reciprocal realization: backward channels equal the forward ones."""
        return cls(h1, h2, h1, h2, reciprocal=True)

    @property
    def k(self) -> int:
        return self.h1.size

    def swapped(self) -> "ChannelRealization":
        """Exchange the roles of S1 and S2."""
        return ChannelRealization(self.h2, self.h1, self.h2r, self.h1r, self.reciprocal)


@dataclass(frozen=True)
class SumPower:
    total: float

    def __post_init__(self):
        if not self.total > 0:
            raise ParameterError("relay sum power must be positive")


@dataclass(frozen=True)
class Individual:
    powers: np.ndarray

    def __post_init__(self):
        p = _frozen(self.powers, float)
        if p.size < 1 or np.any(~(p > 0)):
            raise ParameterError("individual relay powers must be positive")
        object.__setattr__(self, "powers", p)

    @property
    def total(self) -> float:
        return float(self.powers.sum())


RelayConstraint = Union[SumPower, Individual]


@dataclass(frozen=True)
class SystemConfig:
    """Source powers, noise variances and the relay power constraint.

    ``sigma_relay`` may be given as a scalar; it is broadcast to K entries on
    first use against a channel.
    """

    p_s1: float
    p_s2: float
    sigma_relay: np.ndarray
    sigma_s1: float
    sigma_s2: float
    relay_constraint: RelayConstraint

    def __post_init__(self):
        object.__setattr__(self, "sigma_relay", _frozen(self.sigma_relay, float))
        for name in ("p_s1", "p_s2", "sigma_s1", "sigma_s2"):
            if not getattr(self, name) > 0:
                raise ParameterError(f"{name} must be positive")
        if np.any(~(self.sigma_relay > 0)):
            raise ParameterError("relay noise variances must be positive")

    @classmethod
    def unit_noise(cls, p_s1: float, p_s2: float, k: int,
                   relay_constraint: RelayConstraint) -> "SystemConfig":
        return cls(p_s1, p_s2, np.ones(k), 1.0, 1.0, relay_constraint)

    @property
    def is_sum_power(self) -> bool:
        return isinstance(self.relay_constraint, SumPower)

    def relay_noise(self, k: int) -> np.ndarray:
        s = self.sigma_relay
        if s.size == 1:
            return np.full(k, float(s[0]))
        if s.size != k:
            raise DimensionError(f"expected {k} relay noise variances, got {s.size}")
        return np.asarray(s)

    def check(self, k: int) -> None:
        self.relay_noise(k)
        if isinstance(self.relay_constraint, Individual) and self.relay_constraint.powers.size != k:
            raise DimensionError("individual power vector length must equal K")

    def with_constraint(self, relay_constraint: RelayConstraint) -> "SystemConfig":
        return SystemConfig(self.p_s1, self.p_s2, self.sigma_relay, self.sigma_s1,
                            self.sigma_s2, relay_constraint)


@dataclass(frozen=True)
class EffectiveChannels:
    """Composite quantities entering the SNR and power expressions.

    f1 = h1 * h2r (S1 -> S2 link), f2 = h2 * h1r (S2 -> S1 link); a1, a2 are the
    diagonals of the forwarded relay-noise matrices and d the diagonal of the
    relay power matrix. ``f_hat`` is only set for reciprocal channels.
    """

    f1: np.ndarray
    f2: np.ndarray
    a1: np.ndarray
    a2: np.ndarray
    d: np.ndarray
    sigma: np.ndarray
    f_hat: Optional[np.ndarray] = field(default=None)

    @property
    def k(self) -> int:
        return self.f1.size


def effective_channels(ch: ChannelRealization, cfg: SystemConfig) -> EffectiveChannels:
    cfg.check(ch.k)
    sigma = cfg.relay_noise(ch.k)
    d = np.abs(ch.h1) ** 2 * cfg.p_s1 + np.abs(ch.h2) ** 2 * cfg.p_s2 + sigma
    f_hat = np.abs(ch.h1) * np.abs(ch.h2) if ch.reciprocal else None
    return EffectiveChannels(
        f1=ch.h1 * ch.h2r,
        f2=ch.h2 * ch.h1r,
        a1=np.abs(ch.h1r) ** 2 * sigma,
        a2=np.abs(ch.h2r) ** 2 * sigma,
        d=d,
        sigma=sigma,
        f_hat=f_hat,
    )


def _as_weights(w, k: int) -> np.ndarray:
    w = np.asarray(w, dtype=complex)
    if w.shape[-1] != k:
        raise DimensionError(f"beam vector length {w.shape[-1]} != K={k}")
    return w


def snr_pair(w, eff: EffectiveChannels, cfg: SystemConfig) -> Tuple:
    """Received SNRs at S1 and S2 for beam vector(s) ``w``.

    ``w`` may be a single length-K vector or a stack of shape (..., K); the
    result then has the leading shape.
    """
    w = _as_weights(w, eff.k)
    pw = np.abs(w) ** 2
    snr1 = cfg.p_s2 * np.abs(w @ eff.f2) ** 2 / (cfg.sigma_s1 + pw @ eff.a1)
    snr2 = cfg.p_s1 * np.abs(w @ eff.f1) ** 2 / (cfg.sigma_s2 + pw @ eff.a2)
    if np.ndim(snr1) == 0:
        return float(snr1), float(snr2)
    return snr1, snr2


def snr_to_rate(snr):
    """Per-slot-halved Shannon rate in bits per channel use."""
    return 0.5 * np.log2(1.0 + np.asarray(snr, dtype=float))


def rate_pair(w, eff: EffectiveChannels, cfg: SystemConfig) -> Tuple:
    snr1, snr2 = snr_pair(w, eff, cfg)
    r1, r2 = snr_to_rate(snr1), snr_to_rate(snr2)
    if np.ndim(r1) == 0:
        return float(r1), float(r2)
    return r1, r2


def relay_powers(w, ch: ChannelRealization, cfg: SystemConfig) -> Tuple[np.ndarray, float]:
    """Per-relay transmit powers |w_i|^2 d_i and their total."""
    w = _as_weights(w, ch.k)
    d = effective_channels(ch, cfg).d
    per = np.abs(w) ** 2 * d
    return per, float(per.sum())


def _cscg(rng: np.random.Generator, shape, var=1.0) -> np.ndarray:
    scale = np.sqrt(np.asarray(var, dtype=float) / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def simulate_link(w, ch: ChannelRealization, cfg: SystemConfig, n_symbols: int,
                  seed: int, chunk: int = 1 << 17) -> Tuple[float, float]:
    """Symbol-level simulation of both slots; returns measured SNRs at S1, S2.

    Symbols are unit-power CSCG scaled to the source powers. After removing
    the self-interference, the desired component is formed from the known
    symbols and the true end-to-end coefficient; everything else in the
    residual counts as noise.
    """
    if n_symbols < 10_000:
        raise ParameterError("n_symbols must be at least 1e4")
    w = _as_weights(w, ch.k)
    sigma = cfg.relay_noise(ch.k)
    rng = np.random.default_rng(seed)
    a1, a2 = np.sqrt(cfg.p_s1), np.sqrt(cfg.p_s2)
    c1_self = np.sum(ch.h1r * w * ch.h1) * a1
    c2_self = np.sum(ch.h2r * w * ch.h2) * a2
    c1_des = np.sum(ch.h1r * w * ch.h2) * a2
    c2_des = np.sum(ch.h2r * w * ch.h1) * a1

    sig = np.zeros(2)
    noi = np.zeros(2)
    done = 0
    while done < n_symbols:
        n = min(chunk, n_symbols - done)
        s1 = _cscg(rng, n)
        s2 = _cscg(rng, n)
        v = _cscg(rng, (n, ch.k), sigma)
        t = np.outer(a1 * s1, ch.h1) + np.outer(a2 * s2, ch.h2) + v
        u = t * w
        y1 = u @ ch.h1r + _cscg(rng, n, cfg.sigma_s1)
        y2 = u @ ch.h2r + _cscg(rng, n, cfg.sigma_s2)
        y1 = y1 - c1_self * s1
        y2 = y2 - c2_self * s2
        d1 = c1_des * s2
        d2 = c2_des * s1
        sig += [np.vdot(d1, d1).real, np.vdot(d2, d2).real]
        e1, e2 = y1 - d1, y2 - d2
        noi += [np.vdot(e1, e1).real, np.vdot(e2, e2).real]
        done += n
    return float(sig[0] / noi[0]), float(sig[1] / noi[1])
