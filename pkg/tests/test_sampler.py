import numpy as np
import pytest

from skewspec.density import WeightSpec, log_rho
from skewspec.ensemble import extract_skew_spectrum
from skewspec.sampler import (
    acceptance_probability,
    initial_state,
    ks_compare,
    metropolis_step,
    p1_quadrature_cdf,
    run_chain,
    sample_ambient_pair,
)

W_HALF = WeightSpec(gamma=0.5)


def test_acceptance_probability_is_metropolis_rule():
    # hand-computed delta log rho values
    assert acceptance_probability(0.0) == 1.0
    assert acceptance_probability(2.5) == 1.0
    assert acceptance_probability(-0.5) == pytest.approx(np.exp(-0.5), rel=1e-15)
    assert acceptance_probability(-np.log(4.0)) == pytest.approx(0.25, rel=1e-15)


def test_initial_state_consistent_cache():
    state = initial_state(3, W_HALF)
    assert state.log_density == pytest.approx(
        log_rho(state.config, W_HALF).log_unnormalized, rel=1e-12
    )
    assert state.accepted == 0 and state.proposed == 0


def test_metropolis_step_counters_and_domain():
    # a huge step from a point near the boundary is almost surely negative,
    # hence rejected with the configuration unchanged
    state = initial_state(1, W_HALF, step_scale=200.0)
    rejected = 0
    for seed in range(20):
        out = metropolis_step(state, W_HALF, seed)
        assert out.proposed == 1
        if out.accepted == 0:
            rejected += 1
            assert np.array_equal(out.config.points, state.config.points)
            assert out.log_density == state.log_density
    assert rejected >= 18


def test_metropolis_step_deterministic():
    state = initial_state(2, W_HALF)
    a = metropolis_step(state, W_HALF, 5)
    b = metropolis_step(state, W_HALF, 5)
    assert np.array_equal(a.config.points, b.config.points)
    assert a.accepted == b.accepted


def test_metropolis_trajectory_stays_finite():
    state = initial_state(2, W_HALF)
    rng = np.random.default_rng(6)
    for _ in range(200):
        state = metropolis_step(state, W_HALF, rng)
        assert np.isfinite(state.log_density)
        assert np.all(state.config.points > 0)
    assert state.proposed == 200
    assert 0 < state.accepted <= 200
    # cached log density stays consistent with the configuration
    assert state.log_density == pytest.approx(
        log_rho(state.config, W_HALF).log_unnormalized, rel=1e-12
    )


def test_run_chain_defaults_and_acceptance():
    report = run_chain(1, W_HALF, 2000, burn_in=4000, thinning=5, seed=11)
    assert report.samples.shape == (2000, 1, 2)
    assert 0.2 <= report.acceptance_rate <= 0.5
    assert np.all(report.samples > 0)
    for i in (0, 100, 1999):
        assert log_rho(report.spectrum(i), W_HALF).finite


def test_run_chain_seed_agreement():
    a = run_chain(1, W_HALF, 3000, burn_in=5000, thinning=10, seed=1)
    b = run_chain(1, W_HALF, 3000, burn_in=5000, thinning=10, seed=2)
    xa, xb = a.samples[:, 0, 0], b.samples[:, 0, 0]
    se = np.sqrt(xa.var() / xa.size + xb.var() / xb.size)
    assert abs(xa.mean() - xb.mean()) <= 3 * se


def test_run_chain_stationarity_between_segments():
    # appending a longer segment must not shift the x-marginal mean
    short = run_chain(1, W_HALF, 2000, burn_in=5000, thinning=10, seed=14)
    long = run_chain(1, W_HALF, 4000, burn_in=5000, thinning=10, seed=14)
    head, tail = long.samples[:2000, 0, 0], long.samples[2000:, 0, 0]
    assert np.array_equal(short.samples, long.samples[:2000])
    se = np.sqrt(head.var() / head.size + tail.var() / tail.size)
    assert abs(head.mean() - tail.mean()) <= 3 * se


def test_run_chain_argument_validation():
    with pytest.raises(ValueError):
        run_chain(0, W_HALF, 10)
    with pytest.raises(ValueError):
        run_chain(1, W_HALF, 10, thinning=0)


def test_sample_ambient_pair_round_trip():
    report = run_chain(2, W_HALF, 50, burn_in=2000, thinning=5, seed=3)
    pair = sample_ambient_pair(report, 7, rng=4)
    assert pair.anticommutation_residual <= 1e-10 * pair.n
    recovered = extract_skew_spectrum(pair)
    stored = report.spectrum(7).sorted()
    assert np.max(np.abs(recovered.points - stored.points) / stored.points) <= 1e-8
    expected_norm = 2.0 * float(np.sum(stored.points**2))
    assert pair.norm_squared == pytest.approx(expected_norm, rel=1e-10)


def test_sample_ambient_pair_index_check():
    report = run_chain(1, W_HALF, 10, burn_in=100, thinning=2, seed=5)
    with pytest.raises(IndexError):
        sample_ambient_pair(report, 10)


@pytest.mark.parametrize("resolution,rel", [(512, 1e-4), (4096, 2e-6)])
def test_quadrature_normalization_against_closed_form(resolution, rel):
    # total mass of the p=1 integrand over the quarter plane is
    # (1/2) int_0^inf r^4 e^{-gamma r^2} dr = (3/16) sqrt(pi / gamma^5);
    # the trapezoid rule converges at O(h^2)
    for gamma in (0.5, 1.0):
        table = p1_quadrature_cdf(WeightSpec(gamma=gamma), grid_resolution=resolution)
        closed = 16.0 * gamma**2.5 / (3.0 * np.sqrt(np.pi))
        assert table.normalization == pytest.approx(closed, rel=rel)
        assert table.cdf_x[-1] == pytest.approx(1.0, abs=1e-12)
        assert table.cdf2d[-1, -1] == pytest.approx(1.0, abs=1e-8)


def test_quadrature_symmetric_in_x_and_y():
    table = p1_quadrature_cdf(W_HALF, grid_resolution=256)
    assert np.allclose(table.cdf_x, table.cdf_y, atol=1e-12)
    for a, b in [(0.7, 1.9), (2.0, 0.4)]:
        assert table.cdf(a, b) == pytest.approx(table.cdf(b, a), abs=1e-12)


def test_quadrature_mode_location():
    # the integrand peaks at x = y = sqrt(3 / (4 gamma)); gamma = 1/2 puts it
    # at sqrt(3/2), matching the tau stationary point
    table = p1_quadrature_cdf(W_HALF, grid_resolution=512)
    from skewspec.sampler import _p1_integrand

    t = table.grid
    values = _p1_integrand(t[:, None], t[None, :], table.gamma)
    i, j = np.unravel_index(np.argmax(values), values.shape)
    cell = t[1] - t[0]
    assert abs(t[i] - np.sqrt(1.5)) <= cell
    assert abs(t[j] - np.sqrt(1.5)) <= cell


def test_ks_self_consistency():
    rng = np.random.default_rng(7)
    data = np.abs(rng.standard_normal((2000, 2))) + 0.1
    xs = np.sort(data[:, 0])
    # reference CDF built from the sample itself: statistic collapses to ~1/n
    grid = np.concatenate([[0.0], xs])
    cdf = np.concatenate([[0.0], np.arange(1, xs.size + 1) / xs.size])

    from skewspec.sampler import _ks_statistic

    assert _ks_statistic(data[:, 0], grid, cdf) <= 2.0 / xs.size + 1e-9


def test_ks_compare_validation():
    table = p1_quadrature_cdf(W_HALF, grid_resolution=128)
    with pytest.raises(ValueError, match="1000"):
        ks_compare(np.ones((10, 2)), table)


def test_chain_matches_quadrature_and_negative_control():
    table = p1_quadrature_cdf(W_HALF)
    good = run_chain(1, W_HALF, 4000, burn_in=5000, thinning=5, seed=8)
    ks = ks_compare(good, table)
    assert ks.x < 0.05 and ks.y < 0.05

    bad = run_chain(1, WeightSpec(gamma=1.0), 4000, burn_in=5000, thinning=5, seed=9)
    ks_bad = ks_compare(bad, table)
    assert ks_bad.x > 0.1 and ks_bad.y > 0.1
