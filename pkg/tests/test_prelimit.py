"""Exact normalizing sequences, block extreme samplers, and the
shrinking-window schedules for fractional fields."""

import math

import numpy as np
import pytest

from gpextremes import (
    FbmSchedule,
    ParameterError,
    Stream,
    WindowError,
    asymptotic_un,
    fbm_cov,
    ks_two_sample,
    min_level,
    normalizers_max,
    normalizers_min,
    sample_block_max,
    sample_block_min_abs,
    sample_single_site_max,
    solve_un,
)
from gpextremes.prelimit import fbm_prelimit_cov

SQRT_2PI = math.sqrt(2.0 * math.pi)


def test_solve_un_pinned_root():
    assert solve_un(10) == pytest.approx(1.4316537900142283, rel=1e-14)


@pytest.mark.parametrize("n", [2.0, 10.0, 1e3, 1e6, 1e60, 1e300])
def test_solve_un_satisfies_defining_equation(n):
    u = solve_un(n)
    # residual of sqrt(2 pi) u exp(u^2/2) = n, evaluated in log form
    resid = abs(math.expm1(math.log(u) + 0.5 * u * u
                           - (math.log(n) - 0.5 * math.log(2.0 * math.pi))))
    assert resid < 1e-9


def test_solve_un_rejects_small_counts():
    with pytest.raises(ParameterError):
        solve_un(1.0)


def test_asymptotic_un_approaches_exact_root():
    gap_small = abs(solve_un(1e6) - asymptotic_un(1e6))
    gap_large = abs(solve_un(1e30) - asymptotic_un(1e30))
    assert gap_small < 0.05
    assert gap_large < 0.005
    assert gap_large < gap_small
    with pytest.raises(ParameterError):
        asymptotic_un(2.0)


def test_min_level_value():
    assert min_level(10.0) == pytest.approx(10.0 / SQRT_2PI, rel=1e-15)


def test_normalizers_max_and_min_shapes():
    nm = normalizers_max(100.0, sigma=2.0)
    u = solve_un(100.0)
    assert nm.a == pytest.approx(u / 2.0)
    assert nm.b == pytest.approx(2.0 * u)
    assert nm(2.0 * u) == pytest.approx(0.0)
    nmin = normalizers_min(100.0, sigma=2.0)
    assert nmin.a == pytest.approx(min_level(100.0) / 2.0)
    assert nmin.b == 0.0
    with pytest.raises(ParameterError):
        normalizers_max(100.0, sigma=0.0)


def test_block_max_shape_and_determinism():
    cov = fbm_cov([1.0, 2.0], 1.0)
    a = sample_block_max(cov, 50, 300, Stream(3))
    b = sample_block_max(cov, 50, 300, Stream(3))
    assert a.shape == (300, 2)
    assert np.array_equal(a, b)


def test_block_max_workers_do_not_change_output():
    cov = fbm_cov([1.0, 2.0], 0.5)
    a = sample_block_max(cov, 200, 700, Stream(11), workers=1)
    b = sample_block_max(cov, 200, 700, Stream(11), workers=3)
    assert np.array_equal(a, b)


def test_block_min_abs_is_nonnegative_and_deterministic():
    cov = fbm_cov([1.0, 2.0], 1.0)
    a = sample_block_min_abs(cov, 50, 300, Stream(5))
    b = sample_block_min_abs(cov, 50, 300, Stream(5))
    assert np.all(a >= 0.0)
    assert np.array_equal(a, b)


def test_block_extreme_validates_counts():
    cov = fbm_cov([1.0], 1.0)
    with pytest.raises(ParameterError):
        sample_block_max(cov, 0, 10, Stream(0))
    with pytest.raises(ParameterError):
        sample_block_max(cov, 10, 0, Stream(0))
    with pytest.raises(ParameterError):
        sample_single_site_max(1.0, 0.5, 10, Stream(0))
    with pytest.raises(ParameterError):
        sample_single_site_max(0.0, 10, 10, Stream(0))


@pytest.mark.parametrize("seed", [2, 9])
def test_single_site_max_matches_brute_force_route(seed):
    # quantile-inversion draws against explicit max over 1000 Gaussians
    n, reps = 1000, 3000
    exact = sample_single_site_max(1.0, n, reps, Stream(seed).child(0))
    cov = fbm_cov([1.0], 1.0)
    brute = sample_block_max(cov, n, reps, Stream(seed).child(1))[:, 0]
    assert ks_two_sample(exact, brute, level=0.01).passed


def test_single_site_max_handles_astronomical_counts():
    n = 1e60
    z = sample_single_site_max(1.0, n, 4000, Stream(21))
    assert np.all(np.isfinite(z))
    u = solve_un(n)
    centered = u * (z - u)
    # standard Gumbel has mean equal to the Euler-Mascheroni constant
    assert abs(centered.mean() - 0.5772156649015329) < 0.02


def test_fbm_schedule_windows():
    smax = FbmSchedule(alpha=0.5, t0=1.0, mode="max")
    n = 100.0
    assert smax.window(n) == pytest.approx(1.0 / (2.0 * math.log(n)) ** 2)
    shigh = FbmSchedule(alpha=1.5, t0=1.0, mode="max")
    assert shigh.window(n) == pytest.approx(1.0 / (2.0 * math.log(n)))
    smin = FbmSchedule(alpha=0.5, t0=2.0, mode="min")
    assert smin.window(n) == pytest.approx(2.0 * (2.0 * math.pi / n**2) ** 2)


def test_fbm_schedule_sites_and_window_error():
    s = FbmSchedule(alpha=0.5, t0=1.0, mode="max")
    sites = s.sites(100.0, [0.0, 1.0])
    assert sites[0] == pytest.approx(1.0)
    assert sites[1] > sites[0]
    with pytest.raises(WindowError):
        s.sites(2.0, [-5.0])


def test_fbm_schedule_drift_regimes():
    t = np.array([0.0, 1.0, 2.0])
    assert np.array_equal(FbmSchedule(alpha=0.5, t0=1.0, mode="max").drift(t), np.zeros(3))
    assert np.allclose(FbmSchedule(alpha=1.0, t0=1.0, mode="max").drift(t), 0.5 * t)
    assert np.allclose(FbmSchedule(alpha=1.5, t0=1.0, mode="max").drift(t), 0.75 * t)
    with pytest.raises(ParameterError):
        FbmSchedule(alpha=1.0, t0=1.0, mode="min").drift(t)


def test_fbm_schedule_gamma_limits():
    t = np.array([0.0, 1.0])
    low = FbmSchedule(alpha=0.5, t0=3.0, mode="max").gamma_limit(t)
    assert low[0, 1] == pytest.approx(1.0)
    high = FbmSchedule(alpha=1.5, t0=3.0, mode="max").gamma_limit(t)
    assert np.array_equal(high, np.zeros((2, 2)))
    m = FbmSchedule(alpha=1.5, t0=3.0, mode="min").gamma_limit(np.array([0.0, 2.0]))
    assert m[0, 1] == pytest.approx(2.0**1.5)


def test_fbm_schedule_anchor_sigma():
    s = FbmSchedule(alpha=0.5, t0=4.0, mode="max")
    assert s.anchor_sigma == pytest.approx(2.0 ** 0.5)


def test_fbm_schedule_validation():
    with pytest.raises(ParameterError):
        FbmSchedule(alpha=0.0, t0=1.0, mode="max")
    with pytest.raises(ParameterError):
        FbmSchedule(alpha=1.0, t0=0.0, mode="max")
    with pytest.raises(ParameterError):
        FbmSchedule(alpha=1.0, t0=1.0, mode="avg")
    with pytest.raises(ParameterError):
        FbmSchedule(alpha=1.0, t0=1.0, mode="max").window(1.0)


def test_fbm_prelimit_cov_matches_direct_construction():
    s = FbmSchedule(alpha=0.8, t0=1.0, mode="max")
    c = fbm_prelimit_cov(s, 50.0, [0.0, 1.0])
    d = fbm_cov(s.sites(50.0, [0.0, 1.0]), 0.8)
    assert np.array_equal(c.values, d.values)
