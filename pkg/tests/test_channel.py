import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import cn, nonreciprocal_channel, reciprocal_channel, trivial_setup, unit_config
from twrelay.channel import (
    ChannelRealization,
    Individual,
    SumPower,
    SystemConfig,
    effective_channels,
    rate_pair,
    relay_powers,
    simulate_link,
    snr_pair,
    snr_to_rate,
)
from twrelay.errors import DimensionError, ParameterError

HALF_LOG_1P5 = 0.5 * np.log2(1.5)


def test_effective_channels_trivial():
    ch, cfg = trivial_setup()
    eff = effective_channels(ch, cfg)
    for v, want in ((eff.f1, 1), (eff.f2, 1), (eff.f_hat, 1), (eff.a1, 1), (eff.a2, 1), (eff.d, 3)):
        np.testing.assert_array_equal(v, [want])


def test_effective_channels_hadamard():
    ch = ChannelRealization([1, 1j], [1, 1], [1, 1], [1j, 1])
    eff = effective_channels(ch, unit_config(2, SumPower(1.0)))
    np.testing.assert_allclose(eff.f1, [1j, 1j])
    assert eff.f_hat is None


def test_power_diagonal_recomputed(rng):
    k = 5
    ch = nonreciprocal_channel(rng, k)
    sigma = rng.uniform(0.5, 2.0, k)
    cfg = SystemConfig(2.0, 0.7, sigma, 1.0, 1.0, SumPower(10.0))
    eff = effective_channels(ch, cfg)
    want = [2.0 * abs(ch.h1[i]) ** 2 + 0.7 * abs(ch.h2[i]) ** 2 + sigma[i] for i in range(k)]
    np.testing.assert_allclose(eff.d, want, rtol=1e-14)
    assert np.all(eff.d > 0)


def test_length_mismatch():
    with pytest.raises(DimensionError):
        ChannelRealization([1, 2], [1], [1, 2], [1, 2])
    with pytest.raises(DimensionError):
        effective_channels(ChannelRealization.from_forward([1, 1], [1, 1]),
                           unit_config(3, SumPower(1.0)))


def test_bad_parameters():
    with pytest.raises(ParameterError):
        SumPower(0.0)
    with pytest.raises(ParameterError):
        Individual([1.0, -1.0])
    with pytest.raises(ParameterError):
        ChannelRealization([1], [1], [2], [1], reciprocal=True)


def test_snr_and_rate_trivial():
    ch, cfg = trivial_setup()
    eff = effective_channels(ch, cfg)
    assert snr_pair([1.0], eff, cfg) == pytest.approx((0.5, 0.5), abs=1e-15)
    assert snr_pair([0.0], eff, cfg) == (0.0, 0.0)
    r = rate_pair([1.0], eff, cfg)
    assert r == pytest.approx((HALF_LOG_1P5, HALF_LOG_1P5), abs=1e-15)
    assert r[0] == pytest.approx(0.2925, abs=5e-5)


def test_snr_to_rate_values():
    np.testing.assert_allclose(snr_to_rate([1.0, 0.0, 3.0]), [0.5, 0.0, 1.0])


def test_relay_powers(rng):
    ch, cfg = trivial_setup()
    per, tot = relay_powers([1.0], ch, cfg)
    np.testing.assert_array_equal(per, [3.0])
    assert tot == 3.0
    per, tot = relay_powers([0.0], ch, cfg)
    assert tot == 0.0

    k = 5
    ch = nonreciprocal_channel(rng, k)
    cfg = unit_config(k, SumPower(1.0), p_s1=1.5, p_s2=0.5)
    w = cn(rng, k)
    per, tot = relay_powers(w, ch, cfg)
    D = np.diag(effective_channels(ch, cfg).d)
    assert tot == pytest.approx(np.real(w.conj() @ D @ w), rel=1e-13)
    assert tot == np.sum(per)


def test_batched_snr_matches_loop(rng):
    k = 3
    ch = nonreciprocal_channel(rng, k)
    cfg = unit_config(k, SumPower(1.0))
    eff = effective_channels(ch, cfg)
    W = np.array([cn(rng, k) for _ in range(6)])
    s1, s2 = snr_pair(W, eff, cfg)
    for i, w in enumerate(W):
        a, b = snr_pair(w, eff, cfg)
        assert s1[i] == pytest.approx(a, rel=1e-13)
        assert s2[i] == pytest.approx(b, rel=1e-13)


@given(seed=st.integers(0, 2**32 - 1), phase=st.floats(-np.pi, np.pi))
def test_common_phase_invariance(seed, phase):
    rng = np.random.default_rng(seed)
    k = 4
    ch = nonreciprocal_channel(rng, k)
    cfg = unit_config(k, SumPower(1.0))
    eff = effective_channels(ch, cfg)
    w = cn(rng, k)
    a = snr_pair(w, eff, cfg)
    b = snr_pair(w * np.exp(1j * phase), eff, cfg)
    np.testing.assert_allclose(a, b, rtol=1e-12)


@given(seed=st.integers(0, 2**32 - 1))
def test_aligned_phases_maximise_both_snrs(seed):
    rng = np.random.default_rng(seed)
    k = 4
    ch = reciprocal_channel(rng, k)
    cfg = unit_config(k, SumPower(1.0))
    eff = effective_channels(ch, cfg)
    x = rng.uniform(0.1, 1.0, k)
    aligned = snr_pair(x * np.exp(-1j * (np.angle(ch.h1) + np.angle(ch.h2))), eff, cfg)
    for _ in range(20):
        other = snr_pair(x * np.exp(2j * np.pi * rng.uniform(size=k)), eff, cfg)
        assert other[0] <= aligned[0] * (1 + 1e-12)
        assert other[1] <= aligned[1] * (1 + 1e-12)


def test_simulate_noiseless():
    ch = ChannelRealization.from_forward([1.0], [1.0])
    cfg = SystemConfig(1.0, 1.0, [1e-12], 1e-12, 1e-12, SumPower(3.0))
    s1, s2 = simulate_link([1.0], ch, cfg, 10_000, seed=0)
    assert s1 > 1e6 and s2 > 1e6


def test_simulate_trivial_close_to_analytic():
    ch, cfg = trivial_setup()
    s = simulate_link([1.0], ch, cfg, 10**6, seed=3)
    np.testing.assert_allclose(s, (0.5, 0.5), rtol=0.02)


def test_simulate_zero_beam():
    ch, cfg = trivial_setup()
    s = simulate_link([0.0], ch, cfg, 10_000, seed=0)
    assert s == (0.0, 0.0)


def test_simulate_error_shrinks_with_length(rng):
    k = 3
    ch = nonreciprocal_channel(rng, k)
    cfg = unit_config(k, SumPower(1.0))
    eff = effective_channels(ch, cfg)
    w = cn(rng, k)
    want = np.array(snr_pair(w, eff, cfg))

    def err(n):
        # average over seeds so one lucky short run cannot decide the comparison
        return np.mean([np.abs(np.array(simulate_link(w, ch, cfg, n, s)) - want) / want
                        for s in range(4)])

    assert err(400_000) < err(10_000)


def test_simulate_rejects_short_runs():
    ch, cfg = trivial_setup()
    with pytest.raises(ParameterError):
        simulate_link([1.0], ch, cfg, 100, seed=0)


def test_simulate_deterministic(rng):
    ch, cfg = trivial_setup()
    assert simulate_link([0.7], ch, cfg, 20_000, 9) == simulate_link([0.7], ch, cfg, 20_000, 9)


def test_swapped_channel_swaps_snrs(rng):
    k = 3
    ch = nonreciprocal_channel(rng, k)
    cfg = unit_config(k, SumPower(1.0))
    w = cn(rng, k)
    a = snr_pair(w, effective_channels(ch, cfg), cfg)
    b = snr_pair(w, effective_channels(ch.swapped(), cfg), cfg)
    np.testing.assert_allclose(a, b[::-1], rtol=1e-13)
