import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from ginibre.core import INF, DomainError, EigenSolverError, EnsembleParams
from ginibre.sampler import (
    MC_CHUNK,
    ScaledMatrix,
    binomial_estimate,
    complex_ginibre,
    count_events,
    eigen_moduli,
    make_stream,
    sample_eigen_moduli,
    sample_gamma,
    sample_gamma_array,
    sample_gamma_exponential_sum,
    sample_product_matrix,
    sample_radii,
)
from ginibre.validation import gof_ks


def test_streams_reproducible_and_distinct():
    a = make_stream(5, 0).random(4)
    assert np.array_equal(a, make_stream(5, 0).random(4))
    assert not np.array_equal(a, make_stream(5, 1).random(4))
    assert not np.array_equal(a, make_stream(6, 0).random(4))


def test_stream_accepts_full_64bit_seeds():
    make_stream(2**64 - 1).random()
    make_stream(-3).random()


@pytest.mark.parametrize("k", [1, 2.5, 7, 40])
def test_gamma_against_cdf(k):
    x = sample_gamma_array(k, 20000, make_stream(k * 10, 0))
    assert stats.kstest(x, stats.gamma(k).cdf).pvalue > 1e-3
    assert x.mean() == pytest.approx(k, rel=0.05)


@pytest.mark.parametrize("k", [1, 3, 16])
def test_gamma_paths_agree(k):
    a = sample_gamma_array(k, 20000, make_stream(1, 0))
    b = sample_gamma_exponential_sum(k, 20000, make_stream(1, 1))
    assert gof_ks(a, b).p_value > 1e-3


def test_gamma_domain_and_shape():
    assert sample_gamma_array(3, (4, 5), make_stream(0)).shape == (4, 5)
    assert sample_gamma(2, make_stream(0)) > 0
    with pytest.raises(DomainError):
        sample_gamma_array(0.5, 3, make_stream(0))
    with pytest.raises(DomainError):
        sample_gamma_exponential_sum(17, 3, make_stream(0))


def test_sample_radii_layout_and_determinism():
    s = sample_radii(EnsembleParams(2, 4), 1000, seed=9)
    assert s.batch.shape == (1000, 4) and s.count == 1000
    assert np.all(s.batch > 0)
    assert np.array_equal(s.batch, sample_radii(EnsembleParams(2, 4), 1000, seed=9).batch)
    # E (R_k^2) = k^n
    assert s.batch.mean(axis=0) == pytest.approx([1, 4, 9, 16], rel=0.1)
    with pytest.raises(DomainError):
        sample_radii(EnsembleParams(1, INF), 10, seed=0)


def test_product_matches_direct_multiplication():
    params = EnsembleParams(4, 5)
    scaled = sample_product_matrix(params, make_stream(3, 0))
    rng = make_stream(3, 0)
    direct = complex_ginibre(5, rng)
    for _ in range(3):
        direct = direct @ complex_ginibre(5, rng)
    assert np.allclose(scaled.dense(), direct, rtol=1e-12, atol=1e-12 * np.abs(direct).max())
    assert 0.5 <= np.abs(scaled.entries).max() <= 2.0


def test_deep_product_stays_finite():
    params = EnsembleParams(400, 3)
    m = sample_product_matrix(params, make_stream(0))
    assert np.all(np.isfinite(m.entries)) and abs(m.log_scale) > 10
    assert np.all(np.isfinite(eigen_moduli(m)))


def test_ginibre_entry_variance():
    x = complex_ginibre(400, make_stream(2))
    assert np.mean(np.abs(x) ** 2) == pytest.approx(1.0, rel=0.02)


def test_eigen_moduli_companion_matrices():
    # x^2 - 3x + 2 has roots 1, 2; x^2 + 4 has roots +-2i
    real_roots = ScaledMatrix(np.array([[3.0, -2.0], [1.0, 0.0]], dtype=complex))
    assert eigen_moduli(real_roots) == pytest.approx([1.0, 2.0], rel=1e-13)
    imag_roots = ScaledMatrix(np.array([[0.0, -4.0], [1.0, 0.0]], dtype=complex), log_scale=math.log(3.0))
    assert eigen_moduli(imag_roots) == pytest.approx([6.0, 6.0], rel=1e-13)


def test_eigen_moduli_errors():
    with pytest.raises(DomainError):
        eigen_moduli(ScaledMatrix(np.ones((2, 3), dtype=complex)))
    with pytest.raises(EigenSolverError) as info:
        eigen_moduli(ScaledMatrix(np.full((3, 3), np.nan, dtype=complex), seed=(1, 2, 3)))
    assert info.value.seed == (1, 2, 3)


def test_eigen_moduli_n1_n1_exponential():
    m = sample_eigen_moduli(EnsembleParams(1, 1), 4000, seed=4)
    assert stats.kstest((m**2).ravel(), "expon").pvalue > 1e-3


def test_eigen_moduli_sorted_and_deterministic():
    a = sample_eigen_moduli(EnsembleParams(2, 5), 20, seed=1)
    assert np.all(np.diff(a, axis=1) >= 0)
    assert np.array_equal(a, sample_eigen_moduli(EnsembleParams(2, 5), 20, seed=1))


@settings(max_examples=10, deadline=None)
@given(st.integers(1, 3 * MC_CHUNK), st.integers(0, 2**32), st.integers(2, 4))
def test_count_events_thread_invariant(samples, seed, threads):
    def hits(rng, size):
        return np.count_nonzero(rng.random(size) < 0.3)

    assert count_events(hits, samples, seed, 1) == count_events(hits, samples, seed, threads)


def test_binomial_estimate():
    p, hw = binomial_estimate(250, 1000)
    assert p == 0.25
    assert hw == pytest.approx(2.5758293035489004 * math.sqrt(0.25 * 0.75 / 1000))
    with pytest.raises(DomainError):
        count_events(lambda rng, size: 0, 0, 0)


def test_reference_gamma_mean_and_exponential():
    draws = 100000
    x = sample_gamma_array(4, draws, make_stream(31))
    assert abs(x.mean() - 4.0) <= 5 * math.sqrt(4.0 / draws)
    e = sample_gamma_array(1, 20000, make_stream(32))
    u = -np.log(make_stream(33).random(20000))
    assert gof_ks(e, u).p_value > 1e-3


def test_reference_radii_means():
    draws = 40000
    for n in (1, 2, 3):
        batch = sample_radii(EnsembleParams(n, 5), draws, seed=n).batch
        for k in range(1, 6):
            sd = math.sqrt((k * (k + 1.0)) ** n - float(k) ** (2 * n))
            assert abs(batch[:, k - 1].mean() - k**n) <= 5 * sd / math.sqrt(draws)
    one = sample_radii(EnsembleParams(1, 1), 10000, seed=3).batch.ravel()
    assert stats.kstest(one, "expon").pvalue > 1e-3


def test_reference_matrix_entries():
    rng = make_stream(40)
    single = np.array([abs(sample_product_matrix(EnsembleParams(1, 1), rng).dense()[0, 0]) ** 2 for _ in range(10000)])
    assert stats.kstest(single, "expon").pvalue > 1e-3
    draws = 20000
    flat = np.array([complex_ginibre(3, rng).ravel() for _ in range(draws)])
    cov = flat.T @ flat.conj() / draws
    assert np.all(np.abs(cov - np.eye(9)) <= 5 / math.sqrt(draws))


def test_reference_unscaled_product_n2_N3():
    scaled = sample_product_matrix(EnsembleParams(2, 3), make_stream(12))
    rng = make_stream(12)
    direct = complex_ginibre(3, rng) @ complex_ginibre(3, rng)
    assert np.allclose(scaled.entries * math.exp(scaled.log_scale), direct, rtol=1e-12, atol=0)


def test_reference_eigen_moduli():
    assert eigen_moduli(ScaledMatrix(np.diag([1.0, -2j]))) == pytest.approx([1.0, 2.0], rel=1e-15)
    assert eigen_moduli(ScaledMatrix(np.array([[3 - 4j]]))) == pytest.approx([5.0], rel=1e-15)


def test_substreams_uncorrelated():
    count = 50000
    draws = [make_stream(77, s).standard_normal(count) for s in range(6)]
    corr = np.corrcoef(draws)
    off = corr[~np.eye(6, dtype=bool)]
    assert np.all(np.abs(off) < 5 / math.sqrt(count))
