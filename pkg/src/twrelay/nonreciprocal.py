"""Rate-profile boundary search for non-reciprocal channels.

For a profile ``kappa`` the sum rate ``r`` is maximised subject to
``R1 >= kappa r`` and ``R2 >= (1 - kappa) r``. Dropping the rank-one
constraint on ``X = w w^H`` turns each fixed-``r`` subproblem into an SDP,
so ``r`` is found by bisection. A beam vector is then extracted by exact rank
reduction (sum-power, two constraints) or by random-phase sampling
(per-relay limits).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .channel import (
    ChannelRealization,
    EffectiveChannels,
    Individual,
    SumPower,
    SystemConfig,
    effective_channels,
    rate_pair,
)
from .errors import ContractViolation, NumericalFailure, ParameterError
from .sdp import HermitianTraceSdp, SdpOutcome, SdpStatus, TraceConstraint, solve

__all__ = [
    "RateProfile",
    "SnrTargets",
    "BisectionConfig",
    "BisectionStep",
    "BisectionResult",
    "MinPowerResult",
    "NonreciprocalSolution",
    "snr_targets",
    "rate_upper_bound",
    "snr_constraints",
    "min_sum_power",
    "feasibility_individual",
    "bisect_sum_power",
    "bisect_individual",
    "rank_one_reduce",
    "violation_scores",
    "randomize_rank_one",
    "solve_nonreciprocal",
]


@dataclass(frozen=True)
class RateProfile:
    kappa: float

    def __post_init__(self):
        if not 0.0 <= self.kappa <= 1.0:
            raise ParameterError("kappa must lie in [0, 1]")

    @property
    def kappa_bar(self) -> float:
        return 1.0 - self.kappa


@dataclass(frozen=True)
class SnrTargets:
    gamma1: float
    gamma2: float

    def __post_init__(self):
        if self.gamma1 < 0 or self.gamma2 < 0:
            raise ParameterError("SNR targets must be nonnegative")

    @property
    def zero(self) -> bool:
        return self.gamma1 == 0 and self.gamma2 == 0


@dataclass(frozen=True)
class BisectionConfig:
    """Bisection settings; ``r_max=None`` derives the bracket from the channel."""

    epsilon: float = 1e-3
    r_max: Optional[float] = None
    max_steps: int = 64
    sdp_tol: float = 1e-8

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ParameterError("epsilon must be positive")
        if self.r_max is not None and not self.r_max > 0:
            raise ParameterError("r_max must be positive")


def _profile(p) -> RateProfile:
    return p if isinstance(p, RateProfile) else RateProfile(float(p))


def snr_targets(profile, r: float) -> SnrTargets:
    """SNR levels that deliver rates (kappa r, (1 - kappa) r)."""
    if r < 0:
        raise ParameterError("rate must be nonnegative")
    p = _profile(profile)
    return SnrTargets(2.0 ** (2 * p.kappa * r) - 1.0, 2.0 ** (2 * p.kappa_bar * r) - 1.0)


def rate_upper_bound(eff: EffectiveChannels, cfg: SystemConfig) -> float:
    """Twice the better one-way rate under a sum-power relaxation.

    Each one-way SNR is a generalised Rayleigh quotient with diagonal
    denominator, maximised in closed form. Per-relay limits are relaxed to
    their sum.
    """
    p_r = cfg.relay_constraint.total
    snr1 = cfg.p_s2 * np.sum(np.abs(eff.f2) ** 2 / (cfg.sigma_s1 * eff.d / p_r + eff.a1))
    snr2 = cfg.p_s1 * np.sum(np.abs(eff.f1) ** 2 / (cfg.sigma_s2 * eff.d / p_r + eff.a2))
    return float(np.log2(1.0 + max(snr1, snr2)))


def snr_constraints(eff: EffectiveChannels, cfg: SystemConfig,
                    targets: SnrTargets) -> List[TraceConstraint]:
    """Linear trace forms of ``SNR1 >= gamma1`` and ``SNR2 >= gamma2``."""
    F1 = np.outer(eff.f1.conj(), eff.f1)
    F2 = np.outer(eff.f2.conj(), eff.f2)
    b1 = cfg.p_s2 * F2 - targets.gamma1 * np.diag(eff.a1)
    b2 = cfg.p_s1 * F1 - targets.gamma2 * np.diag(eff.a2)
    return [TraceConstraint(b1, ">=", targets.gamma1 * cfg.sigma_s1),
            TraceConstraint(b2, ">=", targets.gamma2 * cfg.sigma_s2)]


def _nontrivial(cons: List[TraceConstraint]) -> List[TraceConstraint]:
    # a zero target leaves tr(P F X) >= 0, which every PSD X satisfies
    return [c for c in cons if c.bound > 0]


class MinPowerResult(NamedTuple):
    p_r_star: float
    x_opt: Optional[np.ndarray]
    status: SdpStatus


def _fail_on(outcome: SdpOutcome) -> None:
    if outcome.status not in (SdpStatus.OPTIMAL, SdpStatus.INFEASIBLE):
        raise NumericalFailure(f"SDP solver stopped with status {outcome.status.value}")


def min_sum_power(eff: EffectiveChannels, cfg: SystemConfig, targets: SnrTargets,
                  tol: float = 1e-8, budget: Optional[float] = None) -> MinPowerResult:
    """Minimum relay sum power meeting both SNR targets (relaxed).

    With ``budget`` set, the search is confined to tr(DX) <= budget and
    anything needing more power is reported infeasible. Near the edge of the
    infinite-power SNR region the unconstrained minimiser can be arbitrarily
    large, which the cap avoids.
    """
    k = eff.k
    if targets.zero:
        return MinPowerResult(0.0, np.zeros((k, k), complex), SdpStatus.OPTIMAL)
    D = np.diag(eff.d).astype(complex)
    cons = _nontrivial(snr_constraints(eff, cfg, targets))
    if budget is not None:
        cons.append(TraceConstraint(D, "<=", float(budget)))
    prob = HermitianTraceSdp(k, D, tuple(cons))
    out = solve(prob, tol=tol)
    _fail_on(out)
    if out.status is SdpStatus.INFEASIBLE:
        return MinPowerResult(np.inf, None, out.status)
    return MinPowerResult(out.objective_value, out.x_matrix, out.status)


def feasibility_individual(eff: EffectiveChannels, cfg: SystemConfig, targets: SnrTargets,
                           tol: float = 1e-8) -> SdpOutcome:
    """Find X meeting both SNR targets with X_ii <= p_i / d_i.

    Among feasible points the one with least total relay power is returned.
    The objective does not change the verdict, but it steers the solver to an
    extreme point of low rank instead of a high-rank interior point, which
    makes the later phase randomisation far less lossy.
    """
    if not isinstance(cfg.relay_constraint, Individual):
        raise ContractViolation("individual feasibility needs per-relay limits")
    k = eff.k
    if targets.zero:
        return SdpOutcome(SdpStatus.OPTIMAL, np.zeros((k, k), complex), 0.0, 0.0)
    cons = tuple(_nontrivial(snr_constraints(eff, cfg, targets)))
    bounds = cfg.relay_constraint.powers / eff.d
    out = solve(HermitianTraceSdp(k, np.diag(eff.d).astype(complex), cons, bounds), tol=tol)
    if out.status is SdpStatus.MAX_ITERATIONS:
        # with no interior the power objective can stall; the bare feasibility
        # problem still settles the verdict
        out = solve(HermitianTraceSdp(k, None, cons, bounds), tol=tol)
    _fail_on(out)
    return out


@dataclass(frozen=True)
class BisectionStep:
    r: float
    feasible: bool
    p_r_star: float = np.nan
    undecided: bool = False


@dataclass
class BisectionResult:
    r_star: float
    x_opt: np.ndarray
    r_max: float
    trace: List[BisectionStep] = field(default_factory=list)

    def flips_once(self) -> bool:
        """Every feasible tested rate lies below every infeasible one."""
        ok = [s.r for s in self.trace if s.feasible]
        bad = [s.r for s in self.trace if not s.feasible]
        return not ok or not bad or max(ok) < min(bad)


def _bisect(eff, profile, bis: BisectionConfig, r_max: float, test) -> BisectionResult:
    k = eff.k
    r_low, r_up = 0.0, r_max
    x_best = np.zeros((k, k), complex)
    trace = []
    for _ in range(bis.max_steps):
        if r_up - r_low < bis.epsilon:
            break
        r = 0.5 * (r_low + r_up)
        try:
            feasible, x, p = test(snr_targets(profile, r))
            trace.append(BisectionStep(r, feasible, p))
        except NumericalFailure:
            # the solver only stalls when r sits on the feasibility edge to
            # within its accuracy; calling it infeasible keeps r_low certified
            feasible = False
            trace.append(BisectionStep(r, False, np.nan, undecided=True))
        if feasible:
            r_low, x_best = r, x
        else:
            r_up = r
    if r_low == 0.0 and any(s.undecided for s in trace):
        raise NumericalFailure("SDP solver failed at every tested rate")
    return BisectionResult(r_low, x_best, r_max, trace)


def bisect_sum_power(eff: EffectiveChannels, cfg: SystemConfig, profile,
                     bis: BisectionConfig = BisectionConfig()) -> BisectionResult:
    if not isinstance(cfg.relay_constraint, SumPower):
        raise ContractViolation("sum-power bisection needs a SumPower constraint")
    p_r = cfg.relay_constraint.total
    r_max = bis.r_max if bis.r_max is not None else rate_upper_bound(eff, cfg)

    def test(targets):
        res = min_sum_power(eff, cfg, targets, tol=bis.sdp_tol)
        return res.p_r_star <= p_r, res.x_opt, res.p_r_star

    return _bisect(eff, _profile(profile), bis, r_max, test)


def bisect_individual(eff: EffectiveChannels, cfg: SystemConfig, profile,
                      bis: BisectionConfig = BisectionConfig()) -> BisectionResult:
    r_max = bis.r_max if bis.r_max is not None else rate_upper_bound(eff, cfg)

    def test(targets):
        out = feasibility_individual(eff, cfg, targets, tol=bis.sdp_tol)
        return out.optimal, out.x_matrix, np.nan

    return _bisect(eff, _profile(profile), bis, r_max, test)


def _hermitian_basis(r: int) -> np.ndarray:
    """Real basis (r^2 elements) of r x r Hermitian matrices."""
    basis = []
    for a in range(r):
        e = np.zeros((r, r), complex)
        e[a, a] = 1.0
        basis.append(e)
    for a in range(r):
        for b in range(a + 1, r):
            e = np.zeros((r, r), complex)
            e[a, b] = e[b, a] = 1.0
            basis.append(e)
            e = np.zeros((r, r), complex)
            e[a, b], e[b, a] = 1j, -1j
            basis.append(e)
    return np.array(basis)


def rank_one_reduce(x_opt: np.ndarray, constraints: Sequence[np.ndarray],
                    objective: Optional[np.ndarray] = None,
                    rank_tol: float = 1e-12) -> np.ndarray:
    """Rank-one w with w w^H keeping tr(B X) for every listed matrix.

    Repeatedly factors X = V V^H and moves along a Hermitian direction Δ that
    is trace-neutral for all preserved matrices; the step that zeros one
    eigenvalue of I + tΔ keeps X PSD and lowers its rank. Needs at most three
    preserved matrices so that a nonzero Δ exists for every rank >= 2.
    """
    mats = [np.asarray(c, complex) for c in constraints]
    if objective is not None:
        mats.append(np.asarray(objective, complex))
    if len(mats) > 3:
        raise ContractViolation("rank reduction preserves at most three trace values")
    x = np.asarray(x_opt, complex)
    lam, U = np.linalg.eigh(0.5 * (x + x.conj().T))
    k = x.shape[0]
    if lam[-1] <= 0:
        return np.zeros(k, complex)
    keep = lam > rank_tol * lam[-1]
    V = U[:, keep] * np.sqrt(lam[keep])
    while V.shape[1] > 1:
        r = V.shape[1]
        basis = _hermitian_basis(r)
        rows = []
        for B in mats:
            G = V.conj().T @ B @ V
            rows.append(np.real(np.einsum("ij,kji->k", G, basis)))
        if rows:
            _, _, vt = np.linalg.svd(np.array(rows))
            coef = vt[-1]
        else:
            coef = np.zeros(r * r)
            coef[0] = 1.0
        delta = np.tensordot(coef, basis, axes=1)
        ev = np.linalg.eigvalsh(delta)
        big = np.max(np.abs(ev))
        # largest magnitude; prefer the negative end on ties
        pick = ev[0] if -ev[0] >= big * (1 - 1e-12) else ev[-1]
        M = np.eye(r) - delta / pick
        e, Q = np.linalg.eigh(0.5 * (M + M.conj().T))
        keep = e > rank_tol * e[-1]
        V = V @ (Q[:, keep] * np.sqrt(e[keep]))
    return V[:, 0].copy()


def violation_scores(W: np.ndarray, eff: EffectiveChannels, cfg: SystemConfig,
                     targets: SnrTargets) -> np.ndarray:
    """Constraint-violation measure of each candidate row of ``W``.

    A constraint with a zero target can never be violated and is skipped.
    """
    W = np.atleast_2d(W)
    pw = np.abs(W) ** 2
    terms = []
    if targets.gamma2 > 0:
        s = cfg.sigma_s2
        terms.append(1.0 - (cfg.p_s1 * np.abs(W @ eff.f1) ** 2 / (targets.gamma2 * s)
                            - pw @ eff.a2 / s))
    if targets.gamma1 > 0:
        s = cfg.sigma_s1
        terms.append(1.0 - (cfg.p_s2 * np.abs(W @ eff.f2) ** 2 / (targets.gamma1 * s)
                            - pw @ eff.a1 / s))
    if not terms:
        return np.zeros(W.shape[0])
    return np.max(terms, axis=0)


def randomize_rank_one(x_opt: np.ndarray, eff: EffectiveChannels, cfg: SystemConfig,
                       targets: SnrTargets, num_candidates: int = 1000,
                       seed: int = 0) -> np.ndarray:
    """Best of ``num_candidates`` phase vectors with |w_i|^2 = X_ii.

    The first candidate takes its phases from the principal eigenvector of
    ``x_opt`` (exact when X is rank one); the rest are uniformly random.
    """
    if num_candidates < 1:
        raise ParameterError("need at least one candidate")
    amp = np.sqrt(np.maximum(np.real(np.diag(x_opt)), 0.0))
    rng = np.random.default_rng(seed)
    theta = rng.uniform(0.0, 2 * np.pi, size=(num_candidates, amp.size))
    theta[0] = np.angle(np.linalg.eigh(x_opt)[1][:, -1])
    W = amp * np.exp(1j * theta)
    v = violation_scores(W, eff, cfg, targets)
    return W[int(np.argmin(v))]


@dataclass
class NonreciprocalSolution:
    w: np.ndarray
    rates: Tuple[float, float]
    r_star: float
    bisection: BisectionResult


def solve_nonreciprocal(ch: ChannelRealization, cfg: SystemConfig, profile,
                        bis: BisectionConfig = BisectionConfig(), seed: int = 0,
                        num_candidates: int = 1000) -> NonreciprocalSolution:
    """Boundary point for one rate profile, with a rank-one beam vector."""
    eff = effective_channels(ch, cfg)
    profile = _profile(profile)
    if isinstance(cfg.relay_constraint, SumPower):
        res = bisect_sum_power(eff, cfg, profile, bis)
        targets = snr_targets(profile, res.r_star)
        cons = [c.matrix for c in snr_constraints(eff, cfg, targets)]
        w = rank_one_reduce(res.x_opt, cons, np.diag(eff.d))
    else:
        res = bisect_individual(eff, cfg, profile, bis)
        targets = snr_targets(profile, res.r_star)
        w = randomize_rank_one(res.x_opt, eff, cfg, targets, num_candidates, seed)
    return NonreciprocalSolution(w, rate_pair(w, eff, cfg), res.r_star, res)
