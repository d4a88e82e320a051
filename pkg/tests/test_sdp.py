import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import minimize

from twrelay.errors import ParameterError
from twrelay.sdp import (
    HermitianTraceSdp,
    SdpStatus,
    TraceConstraint,
    embed,
    real_embed,
    recover,
    solve,
)


def rand_hermitian(rng, k):
    a = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
    return 0.5 * (a + a.conj().T)


def rand_psd(rng, k, rank=None):
    r = rank or k
    v = rng.standard_normal((k, r)) + 1j * rng.standard_normal((k, r))
    return v @ v.conj().T


def snr_like_problem(rng, k, gamma=(0.3, 0.3)):
    """min tr(DX) with two rank-one-minus-diagonal >= constraints."""
    f1 = rng.standard_normal(k) + 1j * rng.standard_normal(k)
    f2 = rng.standard_normal(k) + 1j * rng.standard_normal(k)
    a1, a2 = rng.uniform(0.2, 1.0, k), rng.uniform(0.2, 1.0, k)
    D = np.diag(rng.uniform(1.0, 3.0, k)).astype(complex)
    cons = (
        TraceConstraint(np.outer(f2.conj(), f2) - gamma[0] * np.diag(a1), ">=", gamma[0]),
        TraceConstraint(np.outer(f1.conj(), f1) - gamma[1] * np.diag(a2), ">=", gamma[1]),
    )
    return HermitianTraceSdp(k, D, cons)


def trace_values(p, x):
    return [float(np.real(np.trace(c.matrix @ x))) for c in p.constraints]


def test_embed_real_scalar():
    np.testing.assert_array_equal(embed(np.array([[2.0]])), [[2.0, 0.0], [0.0, 2.0]])


def test_embed_spectrum_duplicated():
    m = np.array([[0, 1j], [-1j, 0]])
    e = embed(m)
    np.testing.assert_array_equal(e, e.T)
    want = np.sort(np.repeat(np.linalg.eigvalsh(m), 2))
    np.testing.assert_allclose(np.linalg.eigvalsh(e), want, atol=1e-15)


@given(seed=st.integers(0, 2**32 - 1), k=st.integers(1, 6))
def test_embed_trace_identity(seed, k):
    rng = np.random.default_rng(seed)
    m, x = rand_hermitian(rng, k), rand_psd(rng, k)
    lhs = np.real(np.trace(m @ x))
    rhs = 0.5 * np.trace(embed(m) @ embed(x))
    assert abs(lhs - rhs) < 1e-12 * max(1.0, abs(lhs))


@given(seed=st.integers(0, 2**32 - 1), k=st.integers(1, 6))
def test_recover_round_trip(seed, k):
    m = rand_hermitian(np.random.default_rng(seed), k)
    np.testing.assert_allclose(recover(embed(m)), m, atol=1e-14, rtol=0)


def test_real_embed_diag_bound_rows():
    p = HermitianTraceSdp(2, np.eye(2), (), diag_bounds=[1.0, 2.0])
    rs = real_embed(p)
    assert rs.a_s.shape == (2, 4, 4)
    assert rs.a_s[1, 1, 1] == 0.5 and rs.a_s[1, 3, 3] == 0.5
    np.testing.assert_array_equal(rs.b, [1.0, 2.0])


def test_rejects_non_hermitian():
    with pytest.raises(ParameterError):
        HermitianTraceSdp(2, np.array([[0, 1], [0, 0]]))
    with pytest.raises(ParameterError):
        solve(HermitianTraceSdp(1, np.eye(1)), tol=1e-12)


def test_scalar_lp():
    p = HermitianTraceSdp(1, np.eye(1), (TraceConstraint(np.eye(1), ">=", 1.0),))
    out = solve(p)
    assert out.status is SdpStatus.OPTIMAL
    assert out.objective_value == pytest.approx(1.0, abs=1e-7)
    np.testing.assert_allclose(out.x_matrix, [[1.0]], atol=1e-7)


def test_contradictory_constraints_infeasible():
    p = HermitianTraceSdp(1, None, (TraceConstraint(np.eye(1), ">=", 2.0),), diag_bounds=[1.0])
    out = solve(p)
    assert out.status is SdpStatus.INFEASIBLE
    # Farkas certificate: y with b.y > 0 on the homogenised system
    assert out.certificate is not None


def test_unbounded():
    p = HermitianTraceSdp(1, -np.eye(1), (TraceConstraint(np.eye(1), ">=", 1.0),))
    assert solve(p).status is SdpStatus.UNBOUNDED


def factored_upper(p, rng, starts=10):
    """Best local minimum of tr(C V V^H) over width-2 factors V (an upper bound)."""
    k = p.dim
    C = p.objective

    def unpack(z):
        v = z[: 2 * k] + 1j * z[2 * k:]
        return v.reshape(k, 2)

    def tr(m, z):
        v = unpack(z)
        return float(np.real(np.trace(v.conj().T @ m @ v)))

    cons = [{"type": "ineq", "fun": (lambda z, c=c: tr(c.matrix, z) - c.bound)}
            for c in p.constraints]
    best = np.inf
    for _ in range(starts):
        res = minimize(lambda z: tr(C, z), rng.standard_normal(4 * k), method="SLSQP",
                       constraints=cons, options={"ftol": 1e-14, "maxiter": 500})
        vals = [tr(c.matrix, res.x) for c in p.constraints]
        if min(vals) <= 0:
            continue
        # rescale so every constraint holds exactly
        s = max(1.0, max(c.bound / t for c, t in zip(p.constraints, vals)))
        best = min(best, s * tr(C, res.x))
    return best


def dual_lower(p):
    """b.y for a dual-feasible y (C - sum y_j B_j PSD), found by SLSQP then backed off."""
    b = np.array([c.bound for c in p.constraints])
    mats = [c.matrix for c in p.constraints]

    def slack(y, t=1.0):
        return np.linalg.eigvalsh(p.objective - t * sum(yj * m for yj, m in zip(y, mats)))[0]

    res = minimize(lambda y: -b @ y, np.zeros(len(b)), method="SLSQP",
                   bounds=[(0, None)] * len(b),
                   constraints=[{"type": "ineq", "fun": slack}],
                   options={"ftol": 1e-14, "maxiter": 500})
    y = np.maximum(res.x, 0)
    lo, hi = 0.0, 1.0
    if slack(y) < 0:
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            lo, hi = (mid, hi) if slack(y, mid) >= 0 else (lo, mid)
        y = lo * y
    return float(b @ y)


def test_random_instance_bracketed(rng):
    for _ in range(5):
        p = snr_like_problem(rng, 3)
        out = solve(p)
        assert out.status is SdpStatus.OPTIMAL
        upper, lower = factored_upper(p, rng), dual_lower(p)
        assert lower <= out.objective_value * (1 + 1e-7)
        assert out.objective_value <= upper * (1 + 1e-7)
        assert upper - lower <= 1e-3 * out.objective_value


@given(seed=st.integers(0, 2**32 - 1), k=st.integers(1, 5))
def test_optimal_outcome_contract(seed, k):
    rng = np.random.default_rng(seed)
    p = snr_like_problem(rng, k)
    out = solve(p)
    assert out.status in (SdpStatus.OPTIMAL, SdpStatus.INFEASIBLE)
    if out.status is not SdpStatus.OPTIMAL:
        return
    x = out.x_matrix
    np.testing.assert_allclose(x, x.conj().T, atol=1e-12)
    lam = np.linalg.eigvalsh(x)
    assert lam[0] >= -1e-8 * max(1.0, lam[-1])
    for c, t in zip(p.constraints, trace_values(p, x)):
        assert t >= c.bound - 1e-7 * max(1.0, abs(c.bound))
    # weak duality and complementarity
    assert out.dual_objective <= out.objective_value + 1e-7 * max(1.0, abs(out.objective_value))
    assert out.complementarity <= 1e-8 * (1 + abs(out.objective_value)) * 10
    assert out.kkt_residual <= 1e-8 * 10


def test_tightening_never_decreases_objective(rng):
    for _ in range(5):
        k = 3
        base = snr_like_problem(rng, k)
        prev = -np.inf
        for scale in (0.5, 1.0, 1.5, 2.0):
            cons = tuple(TraceConstraint(c.matrix, c.sense, c.bound * scale)
                         for c in base.constraints)
            out = solve(HermitianTraceSdp(k, base.objective, cons))
            if out.status is not SdpStatus.OPTIMAL:
                break
            assert out.objective_value >= prev - 1e-7 * max(1.0, abs(prev))
            prev = out.objective_value


def test_diag_bounds_respected(rng):
    k = 3
    c = rand_hermitian(rng, k)
    out = solve(HermitianTraceSdp(k, c, (), diag_bounds=[1.0, 0.5, 2.0]))
    assert out.status is SdpStatus.OPTIMAL
    assert np.all(np.real(np.diag(out.x_matrix)) <= np.array([1.0, 0.5, 2.0]) + 1e-7)
    # min tr(CX) over the bounded PSD set is at most 0 (X = 0 is feasible)
    assert out.objective_value <= 1e-7


def test_deterministic(rng):
    p = snr_like_problem(rng, 4)
    a, b = solve(p), solve(p)
    np.testing.assert_array_equal(a.x_matrix, b.x_matrix)
