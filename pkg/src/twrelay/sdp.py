"""Small dense SDP solver for complex Hermitian trace problems.

Problems have the form::

    minimize    tr(C X)
    subject to  tr(B_j X)  (>=, <=, ==)  b_j      j = 1..m
                X_ii <= u_i                      (optional)
                X Hermitian PSD

They are lifted to real symmetric matrices of twice the order and solved with
a homogeneous self-dual primal-dual interior-point method (HKM search
direction, Mehrotra predictor-corrector). The homogeneous embedding yields
either an approximate optimum or a Farkas-type certificate of infeasibility.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
import scipy.linalg as sla

from .errors import ParameterError

__all__ = [
    "SdpStatus",
    "TraceConstraint",
    "HermitianTraceSdp",
    "RealSdp",
    "SdpOutcome",
    "embed",
    "recover",
    "real_embed",
    "solve",
]

SENSES = (">=", "<=", "==")


class SdpStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    MAX_ITERATIONS = "max_iterations"


def _check_hermitian(m: np.ndarray, what: str) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ParameterError(f"{what} must be square")
    if np.max(np.abs(m - m.conj().T), initial=0.0) > 1e-12 * max(1.0, np.max(np.abs(m), initial=0.0)):
        raise ParameterError(f"{what} is not Hermitian")
    return 0.5 * (m + m.conj().T)


@dataclass(frozen=True)
class TraceConstraint:
    matrix: np.ndarray
    sense: str
    bound: float

    def __post_init__(self):
        if self.sense not in SENSES:
            raise ParameterError(f"sense must be one of {SENSES}")
        if not np.isfinite(self.bound):
            raise ParameterError("constraint bounds must be finite")


@dataclass(frozen=True)
class HermitianTraceSdp:
    dim: int
    objective: Optional[np.ndarray]
    constraints: Tuple[TraceConstraint, ...] = ()
    diag_bounds: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.objective is not None:
            c = _check_hermitian(self.objective, "objective")
            if c.shape[0] != self.dim:
                raise ParameterError("objective has the wrong order")
            object.__setattr__(self, "objective", c)
        cons = []
        for j, con in enumerate(self.constraints):
            m = _check_hermitian(con.matrix, f"constraint {j}")
            if m.shape[0] != self.dim:
                raise ParameterError(f"constraint {j} has the wrong order")
            cons.append(TraceConstraint(m, con.sense, float(con.bound)))
        object.__setattr__(self, "constraints", tuple(cons))
        if self.diag_bounds is not None:
            u = np.asarray(self.diag_bounds, dtype=float).reshape(-1)
            if u.size != self.dim or not np.all(np.isfinite(u)):
                raise ParameterError("diag_bounds must be K finite values")
            object.__setattr__(self, "diag_bounds", u)

    @property
    def feasibility_only(self) -> bool:
        return self.objective is None


def embed(m: np.ndarray) -> np.ndarray:
    """Real symmetric lifting [[A, -B], [B, A]] of a Hermitian A + jB."""
    m = np.asarray(m, dtype=complex)
    a, b = m.real, m.imag
    return np.block([[a, -b], [b, a]])


def recover(xh: np.ndarray) -> np.ndarray:
    """Inverse of :func:`embed`, averaging the two copies."""
    k = xh.shape[0] // 2
    x11, x12, x21, x22 = xh[:k, :k], xh[:k, k:], xh[k:, :k], xh[k:, k:]
    x = 0.5 * (x11 + x22) + 0.5j * (x21 - x12)
    return 0.5 * (x + x.conj().T)


@dataclass(frozen=True)
class RealSdp:
    """Standard-form real problem over S^n_+ x R^l_+.

    minimize <c_s, X> + c_l.x  s.t.  <a_s[i], X> + a_l[i].x = b[i].
    The first ``n_user`` rows correspond to the user constraints, the rest to
    diagonal bounds.
    """

    c_s: np.ndarray
    c_l: np.ndarray
    a_s: np.ndarray
    a_l: np.ndarray
    b: np.ndarray
    n_user: int

    @property
    def n(self) -> int:
        return self.c_s.shape[0]


def real_embed(p: HermitianTraceSdp) -> RealSdp:
    k = p.dim
    n = 2 * k
    mats, rhs, slack_sign = [], [], []
    for con in p.constraints:
        mats.append(0.5 * embed(con.matrix))
        rhs.append(con.bound)
        slack_sign.append({">=": -1.0, "<=": 1.0, "==": 0.0}[con.sense])
    if p.diag_bounds is not None:
        for i, u in enumerate(p.diag_bounds):
            e = np.zeros((n, n))
            e[i, i] = e[i + k, i + k] = 0.5
            mats.append(e)
            rhs.append(u)
            slack_sign.append(1.0)
    m = len(mats)
    slack_idx = [i for i, s in enumerate(slack_sign) if s != 0.0]
    a_l = np.zeros((m, len(slack_idx)))
    for col, i in enumerate(slack_idx):
        a_l[i, col] = slack_sign[i]
    c_s = 0.5 * embed(p.objective) if p.objective is not None else np.zeros((n, n))
    a_s = np.array(mats).reshape(m, n, n) if m else np.zeros((0, n, n))
    return RealSdp(c_s=c_s, c_l=np.zeros(len(slack_idx)), a_s=a_s, a_l=a_l,
                   b=np.array(rhs, dtype=float), n_user=len(p.constraints))


@dataclass
class SdpOutcome:
    status: SdpStatus
    x_matrix: np.ndarray
    objective_value: float
    kkt_residual: float
    dual_objective: float = np.nan
    complementarity: float = np.nan
    iterations: int = 0
    duals: np.ndarray = field(default_factory=lambda: np.zeros(0))
    certificate: Optional[np.ndarray] = None

    @property
    def optimal(self) -> bool:
        return self.status is SdpStatus.OPTIMAL


def _sym(a):
    return 0.5 * (a + a.swapaxes(-1, -2))


def _max_step(x: np.ndarray, dx: np.ndarray) -> float:
    """Largest alpha with x + alpha dx PSD (inf if unbounded)."""
    try:
        L = np.linalg.cholesky(x)
    except np.linalg.LinAlgError:
        return 0.0
    t = sla.solve_triangular(L, dx, lower=True)
    t = sla.solve_triangular(L, t.T, lower=True)
    lam = np.linalg.eigvalsh(_sym(t))[0]
    return np.inf if lam >= 0 else -1.0 / lam


def _max_step_vec(x: np.ndarray, dx: np.ndarray) -> float:
    neg = dx < 0
    if not np.any(neg):
        return np.inf
    with np.errstate(over="ignore"):
        return float(np.min(-x[neg] / dx[neg]))


def _nt_scaling(xs, zs):
    """G and lam with G^T Z G = G^{-1} X G^{-T} = diag(lam), or None if not PD."""
    try:
        L = np.linalg.cholesky(xs)
        R = np.linalg.cholesky(zs)
    except np.linalg.LinAlgError:
        return None
    U, lam, Vt = np.linalg.svd(R.T @ L)
    if not lam[-1] > 0:
        return None
    return L @ Vt.T / np.sqrt(lam), lam


_NEIGHBOURHOOD = 1e-4
# give up on a run whose best KKT residual has not halved in this many iterations
_STALL_WINDOW = 10


def _centrality(xs, xl, zs, zl, tau, kap, nu) -> float:
    """Smallest complementarity product relative to the average (0 if outside the cone)."""
    try:
        L = np.linalg.cholesky(_sym(xs))
    except np.linalg.LinAlgError:
        return 0.0
    mu = (float(np.sum(xs * zs) + xl @ zl) + tau * kap) / nu
    if not mu > 0:
        return 0.0
    lo = np.linalg.eigvalsh(_sym(L.T @ zs @ L))[0]
    if xl.size:
        lo = min(lo, float(np.min(xl * zl)))
    return min(lo, tau * kap) / mu


def solve(p: HermitianTraceSdp, tol: float = 1e-8, max_iter: int = 200,
          step_fraction: float = 0.98) -> SdpOutcome:
    """Solve ``p`` to relative accuracy ``tol``."""
    if not 1e-10 <= tol <= 1e-4:
        raise ParameterError("tol must lie in [1e-10, 1e-4]")
    if p.dim > 64:
        raise ParameterError("dense solver supports K <= 64")
    rs = real_embed(p)
    # near-degenerate optima can push iterates off the PSD cone through
    # rounding; a shorter step towards the boundary usually survives
    for frac in (step_fraction, 0.9, 0.8, 0.7, 0.5):
        if frac > step_fraction:
            continue
        out = _hsd(rs, tol, max_iter, frac)
        if out[0] is not SdpStatus.MAX_ITERATIONS:
            break
    status, xs, xl, y, zs, zl, tau, kap, iters, res = out
    k = p.dim
    if status is SdpStatus.OPTIMAL:
        x = recover(xs / tau)
        obj = float(np.real(np.trace(p.objective @ x))) if p.objective is not None else 0.0
        return SdpOutcome(status, x, obj, res["kkt"], dual_objective=res["dobj"],
                          complementarity=res["compl"], iterations=iters,
                          duals=y[: rs.n_user])
    if status is SdpStatus.INFEASIBLE:
        return SdpOutcome(status, np.zeros((k, k), complex), np.nan, res["kkt"],
                          iterations=iters, certificate=y / (rs.b @ y))
    x = recover(xs / tau) if tau > 0 else np.zeros((k, k), complex)
    return SdpOutcome(status, x, np.nan, res["kkt"], iterations=iters)


def _hsd(rs: RealSdp, tol: float, max_iter: int, step_fraction: float):
    n, m, nl = rs.n, rs.b.size, rs.c_l.size
    # row and objective scaling for conditioning; undone on exit
    row = np.sqrt(np.sum(rs.a_s.reshape(m, -1) ** 2, axis=1) + np.sum(rs.a_l ** 2, axis=1))
    row = np.where(row > 0, row, 1.0)
    a_s = rs.a_s / row[:, None, None]
    a_l = rs.a_l / row[:, None]
    b = rs.b / row
    cnorm = np.sqrt(np.sum(rs.c_s ** 2) + np.sum(rs.c_l ** 2))
    cscale = cnorm if cnorm > 0 else 1.0
    c_s, c_l = rs.c_s / cscale, rs.c_l / cscale
    a_flat = a_s.reshape(m, n * n)
    bnorm, cn = np.linalg.norm(b), np.linalg.norm(np.r_[c_s.ravel(), c_l])

    def A(xs, xl):
        return a_flat @ xs.ravel() + a_l @ xl

    def AT(y):
        return (a_flat.T @ y).reshape(n, n), a_l.T @ y

    def dot(us, ul, vs, vl):
        return float(np.sum(us * vs) + ul @ vl)

    xs, zs = np.eye(n), np.eye(n)
    xl, zl = np.ones(nl), np.ones(nl)
    y = np.zeros(m)
    tau = kap = 1.0
    nu = n + nl + 1
    res = {"kkt": np.inf, "dobj": np.nan, "compl": np.nan}
    best_kkt, history = np.inf, []

    for it in range(max_iter + 1):
        ats, atl = AT(y)
        rp = A(xs, xl) - b * tau
        rds, rdl = ats + zs - c_s * tau, atl + zl - c_l * tau
        cx = dot(c_s, c_l, xs, xl)
        by = float(b @ y)
        rg = cx - by + kap
        mu = (dot(xs, xl, zs, zl) + tau * kap) / nu

        pres = np.linalg.norm(rp) / tau / (1 + bnorm)
        dres = np.sqrt(np.sum(rds ** 2) + rdl @ rdl) / tau / (1 + cn)
        pobj, dobj = cx / tau, by / tau
        gap = abs(pobj - dobj) / (1 + abs(pobj) + abs(dobj))
        res["kkt"] = max(pres, dres, gap)
        if res["kkt"] <= tol:
            res["dobj"] = dobj * cscale
            res["compl"] = dot(xs, xl, zs, zl) / tau ** 2 * cscale
            y_out = y / tau * cscale / row
            return (SdpStatus.OPTIMAL, xs, xl, y_out, zs, zl, tau, kap, it, res)
        if by > 0:
            cert = np.sqrt(np.sum((ats + zs) ** 2) + np.sum((atl + zl) ** 2)) / by
            if cert <= tol:
                res["kkt"] = cert
                return (SdpStatus.INFEASIBLE, xs, xl, y / row, zs, zl, tau, kap, it, res)
        if cx < 0:
            cert = np.linalg.norm(A(xs, xl)) / -cx
            if cert <= tol:
                return (SdpStatus.UNBOUNDED, xs, xl, y, zs, zl, tau, kap, it, res)
        if it == max_iter:
            break
        best_kkt = min(best_kkt, res["kkt"])
        history.append(best_kkt)
        if len(history) > _STALL_WINDOW and history[-1] > 0.5 * history[-1 - _STALL_WINDOW]:
            break

        scaling = _nt_scaling(xs, zs)
        if scaling is None:
            break
        G, lam = scaling
        Ginv = np.linalg.inv(G)
        W = G @ G.T
        hl = xl / zl

        def H(vs, vl):
            return _sym(W @ vs @ W), hl * vl

        # Schur complement as a Gram matrix of the scaled constraint matrices
        at = (G.T @ a_s @ G).reshape(m, -1)
        M = at @ at.T + (a_l * hl) @ a_l.T
        M = 0.5 * (M + M.T)
        hcs, hcl = H(c_s, c_l)
        u = A(hcs, hcl)
        chc = dot(c_s, c_l, hcs, hcl)
        hrds, hrdl = H(rds, rdl)
        ahrd = A(hrds, hrdl)
        chrd = dot(c_s, c_l, hrds, hrdl)
        kt = kap / tau
        K = np.empty((m + 1, m + 1))
        K[:m, :m] = M
        K[:m, m] = -(u + b)
        K[m, :m] = u - b
        K[m, m] = -(chc + kt)
        if not np.all(np.isfinite(K)):
            break
        # degenerate optima can make K exactly singular; fall back to a pseudo-inverse
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", sla.LinAlgWarning)
            lu = sla.lu_factor(K, check_finite=False)
        piv_diag = np.abs(np.diag(lu[0]))
        if not np.all(np.isfinite(piv_diag)) or piv_diag.min() <= 1e-14 * piv_diag.max():
            k_pinv = np.linalg.pinv(K)
            solve_k = lambda rhs: k_pinv @ rhs
        else:
            solve_k = lambda rhs: sla.lu_solve(lu, rhs, check_finite=False)

        def direction(rxs, rxl, rtau, eta):
            rhs = np.empty(m + 1)
            rhs[:m] = -eta * rp - A(rxs, rxl) - eta * ahrd
            rhs[m] = -eta * rg - dot(c_s, c_l, rxs, rxl) - eta * chrd - kt * rtau
            sol = solve_k(rhs)
            dy, dtau = sol[:m], sol[m]
            adys, adyl = AT(dy)
            dzs = -eta * rds - adys + c_s * dtau
            dzl = -eta * rdl - adyl + c_l * dtau
            hs, hlv = H(dzs, dzl)
            dxs, dxl = rxs - hs, rxl - hlv
            dkap = kt * (rtau - dtau)
            return dxs, dxl, dy, dzs, dzl, dtau, dkap

        def step(d):
            dxs, dxl, _, dzs, dzl, dtau, dkap = d
            return min(_max_step(xs, dxs), _max_step(zs, dzs), _max_step_vec(xl, dxl),
                       _max_step_vec(zl, dzl), _max_step_vec(np.array([tau]), np.array([dtau])),
                       _max_step_vec(np.array([kap]), np.array([dkap])))

        aff = direction(-xs, -xl, -tau, 1.0)
        if not all(np.all(np.isfinite(v)) for v in aff):
            break
        a_aff = min(1.0, step(aff))
        dxs, dxl, _, dzs, dzl, dtau, dkap = aff
        mu_aff = (dot(xs + a_aff * dxs, xl + a_aff * dxl, zs + a_aff * dzs, zl + a_aff * dzl)
                  + (tau + a_aff * dtau) * (kap + a_aff * dkap)) / nu
        sigma = min(1.0, (mu_aff / mu) ** 3)
        sm = sigma * mu
        # corrector in the scaled space, where the iterate is diag(lam)
        dxt = Ginv @ dxs @ Ginv.T
        dzt = G.T @ dzs @ G
        rhs_c = sm * np.eye(n) - np.diag(lam ** 2) - _sym(dxt @ dzt)
        rxs = _sym(G @ (2.0 * rhs_c / (lam[:, None] + lam[None, :])) @ G.T)
        rxl = -xl + sm / zl - dxl * dzl / zl
        rtau = -tau + sm / kap - dtau * dkap / kap
        d = direction(rxs, rxl, rtau, 1.0 - sigma)
        alpha = min(1.0, step_fraction * step(d))
        if not alpha > 0:
            break
        dxs, dxl, dy, dzs, dzl, dtau, dkap = d
        # stay in a wide neighbourhood of the central path
        for _ in range(30):
            if _centrality(xs + alpha * dxs, xl + alpha * dxl, zs + alpha * dzs,
                           zl + alpha * dzl, tau + alpha * dtau, kap + alpha * dkap,
                           nu) >= _NEIGHBOURHOOD:
                break
            alpha *= 0.8
        xs = _sym(xs + alpha * dxs)
        zs = _sym(zs + alpha * dzs)
        xl = xl + alpha * dxl
        zl = zl + alpha * dzl
        y = y + alpha * dy
        tau += alpha * dtau
        kap += alpha * dkap
    return (SdpStatus.MAX_ITERATIONS, xs, xl, y, zs, zl, tau, kap, it, res)
