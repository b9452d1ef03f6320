"""Covariance construction and Cholesky handling, including the
structural zero-variance rows produced by anchoring a field at a site."""

import math

import numpy as np
import pytest

from gpextremes import (
    CovMatrix,
    FactorizationError,
    JitterPolicy,
    ParameterError,
    Stream,
    cholesky_factor,
    fbm_cov,
    sample_paths,
)
from gpextremes.gaussian import path_batch_to_csv


def test_fbm_cov_alpha_one_is_brownian_min():
    c = fbm_cov([0.0, 1.0, 2.0], 1.0)
    want = np.array([
        [0.0, 0.0, 0.0],
        [0.0, 1.0, 1.0],
        [0.0, 1.0, 2.0],
    ])
    assert np.array_equal(c.values, want)


@pytest.mark.parametrize("alpha", [0.3, 0.5, 1.0, 1.5, 2.0])
def test_fbm_cov_diagonal_and_cross_terms(alpha):
    c = fbm_cov([1.0, 2.0], alpha)
    assert c.values[0, 0] == pytest.approx(1.0)
    assert c.values[1, 1] == pytest.approx(2.0**alpha)
    assert c.values[0, 1] == pytest.approx(0.5 * (1.0 + 2.0**alpha - 1.0))


@pytest.mark.parametrize("bad", [0.0, -0.5, 2.2, math.inf])
def test_fbm_cov_rejects_bad_exponent(bad):
    with pytest.raises(ParameterError):
        fbm_cov([0.0, 1.0], bad)


def test_fbm_cov_rejects_negative_times():
    with pytest.raises(ParameterError):
        fbm_cov([-1.0, 1.0], 1.0)


def test_cov_matrix_rejects_asymmetry_and_nonfinite():
    with pytest.raises(ParameterError):
        CovMatrix(sites=(0, 1), values=np.array([[1.0, 0.5], [0.4, 1.0]]))
    with pytest.raises(ParameterError):
        CovMatrix(sites=(0, 1), values=np.array([[1.0, np.inf], [np.inf, 1.0]]))
    with pytest.raises(ParameterError):
        CovMatrix(sites=(0,), values=np.array([[1.0, 0.0]]))


def test_cholesky_plain_positive_definite_uses_no_jitter():
    c = cholesky_factor(fbm_cov([1.0, 2.0, 3.0], 1.0))
    assert c.jitter_used == 0.0
    assert np.allclose(c.factor @ c.factor.T, c.values)
    # factor is lower triangular
    assert np.allclose(np.triu(c.factor, 1), 0.0)


def test_cholesky_structural_zero_row_gets_zero_factor_row():
    # anchored covariance: pinned site has an exactly zero row/column
    c = cholesky_factor(fbm_cov([0.0, 1.0, 2.0], 1.0))
    assert c.jitter_used == 0.0
    assert np.array_equal(c.factor[0], np.zeros(3))
    assert np.array_equal(c.factor[:, 0], np.zeros(3))
    assert np.allclose(c.factor @ c.factor.T, c.values)


def test_cholesky_zero_variance_with_nonzero_covariance_is_an_error():
    v = np.array([[0.0, 0.5], [0.5, 1.0]])
    with pytest.raises(FactorizationError) as e:
        cholesky_factor(CovMatrix(sites=(0, 1), values=v))
    assert e.value.pivot == 0.0
    assert e.value.pivot_index == 0


def test_cholesky_all_zero_matrix_is_structural():
    c = cholesky_factor(CovMatrix(sites=(0, 1), values=np.zeros((2, 2))))
    assert np.array_equal(c.factor, np.zeros((2, 2)))
    assert c.jitter_used == 0.0


def test_cholesky_near_singular_climbs_jitter_ladder():
    # rank-1 matrix: exactly singular but PSD, needs one rung of jitter
    v = np.array([[1.0, 1.0], [1.0, 1.0]])
    c = cholesky_factor(CovMatrix(sites=(0, 1), values=v))
    assert c.jitter_used > 0.0
    assert c.jitter_used <= 1e-12 * 10.0**5
    assert np.allclose(c.factor @ c.factor.T, v, atol=1e-6)


def test_cholesky_indefinite_reports_first_bad_pivot():
    v = np.array([[1.0, 2.0], [2.0, 1.0]])  # eigenvalues 3 and -1
    with pytest.raises(FactorizationError) as e:
        cholesky_factor(CovMatrix(sites=(0, 1), values=v))
    assert e.value.pivot_index == 1
    assert e.value.pivot < 0.0


def test_cholesky_respects_existing_factor():
    c = cholesky_factor(fbm_cov([1.0, 2.0], 0.5))
    again = cholesky_factor(c)
    assert again is c


def test_jitter_policy_is_configurable():
    v = np.array([[1.0, 1.0], [1.0, 1.0]])
    with pytest.raises(FactorizationError):
        cholesky_factor(CovMatrix(sites=(0, 1), values=v),
                        policy=JitterPolicy(start=1e-30, growth=2.0, max_tries=1))


def test_sample_paths_shape_determinism_and_provenance():
    c = fbm_cov([0.0, 0.5, 1.0], 0.8)
    b1 = sample_paths(c, 64, Stream(3))
    b2 = sample_paths(c, 64, Stream(3))
    assert b1.paths.shape == (64, 3)
    assert np.array_equal(b1.paths, b2.paths)
    # pinned site produces exactly zero paths
    assert np.array_equal(b1.paths[:, 0], np.zeros(64))
    assert "seed=3" in b1.provenance["stream"]


def test_sample_paths_validates_count():
    with pytest.raises(ParameterError):
        sample_paths(fbm_cov([1.0], 1.0), 0, Stream(0))


def test_path_batch_csv_has_header_and_full_precision():
    c = fbm_cov([1.0, 2.0], 1.0)
    text = path_batch_to_csv(sample_paths(c, 2, Stream(5)))
    lines = text.strip().split("\n")
    assert lines[0] == "1.0,2.0"
    assert len(lines) == 3
    first = float(lines[1].split(",")[0])
    again = float(path_batch_to_csv(sample_paths(c, 2, Stream(5))).strip().split("\n")[1].split(",")[0])
    assert first == again
