"""Distance statistics: pinned critical constants and hand-checked
small-sample values."""

import numpy as np
import pytest

from gpextremes import DataError, Ecdf, ParameterError, ks_one_sample, ks_two_sample, mc_stderr
from gpextremes.stats import KS_CRITICAL


def test_critical_constants_are_pinned():
    assert KS_CRITICAL == {0.10: 1.224, 0.05: 1.358, 0.01: 1.628}


def test_ecdf_is_right_continuous():
    f = Ecdf(np.array([3.0, 1.0, 2.0]))
    assert f.n == 3
    got = f(np.array([0.0, 1.0, 2.5, 3.0, 9.0]))
    assert np.array_equal(got, np.array([0.0, 1 / 3, 2 / 3, 1.0, 1.0]))


def test_ecdf_rejects_bad_samples():
    with pytest.raises(DataError):
        Ecdf(np.array([]))
    with pytest.raises(DataError):
        Ecdf(np.array([1.0, np.inf]))


def test_ks_one_sample_hand_value():
    # single point at 0.5 against the uniform law: gap is exactly 0.5
    res = ks_one_sample([0.5], lambda x: np.clip(x, 0.0, 1.0))
    assert res.statistic == pytest.approx(0.5)
    assert res.critical == pytest.approx(1.358)
    res = ks_one_sample([0.25, 0.75], lambda x: np.clip(x, 0.0, 1.0))
    assert res.statistic == pytest.approx(0.25)


def test_ks_one_sample_level_changes_critical():
    r1 = ks_one_sample([0.5], lambda x: np.clip(x, 0.0, 1.0), level=0.01)
    assert r1.critical == pytest.approx(1.628)
    with pytest.raises(ParameterError):
        ks_one_sample([0.5], lambda x: np.clip(x, 0.0, 1.0), level=0.07)


def test_ks_one_sample_rejects_broken_cdf():
    with pytest.raises(DataError):
        ks_one_sample([0.5], lambda x: x * 0 + 2.0)
    with pytest.raises(DataError):
        ks_one_sample([], lambda x: x)


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_ks_one_sample_accepts_its_own_law(seed):
    rng = np.random.default_rng(seed)
    u = rng.random(5000)
    res = ks_one_sample(u, lambda x: np.clip(x, 0.0, 1.0), level=0.01)
    assert res.passed


def test_ks_two_sample_hand_value():
    res = ks_two_sample([0.0, 1.0], [0.5, 1.5])
    assert res.statistic == pytest.approx(0.5)
    assert res.critical == pytest.approx(1.358 * np.sqrt(4 / 4))


def test_ks_two_sample_identical_samples():
    x = [1.0, 2.0, 3.0]
    res = ks_two_sample(x, x)
    assert res.statistic == 0.0
    assert res.passed


@pytest.mark.parametrize("seed", [5, 6])
def test_ks_two_sample_detects_a_shift(seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal(4000)
    b = rng.standard_normal(4000) + 0.25
    assert not ks_two_sample(a, b, level=0.01).passed


def test_mc_stderr_frozen_value():
    assert mc_stderr([1.0, 2.0, 3.0, 4.0]) == pytest.approx(0.6454972243679028, rel=1e-15)
    with pytest.raises(DataError):
        mc_stderr([1.0])
