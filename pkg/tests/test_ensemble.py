import cmath
import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from ginibre.core import INF, DomainError, EnsembleParams
from ginibre.ensemble import (
    ComplexPoint,
    kernel,
    log_joint_density,
    log_radial_density,
    log_weight,
    moduli_joint_density,
    permanent,
    radial_density,
    weight_w_n,
)
from ginibre.sampler import sample_eigen_moduli
from ginibre.special_fn import g_core, survival_log

from oracles import bessel_k0, permanent_bruteforce

coord = st.floats(-2.5, 2.5)
points = st.builds(complex, coord, coord)


def test_complex_point():
    p = ComplexPoint.of(3 + 4j)
    assert p.abs2 == 25.0 and complex(p) == 3 + 4j
    assert ComplexPoint.of(p) is p
    with pytest.raises(DomainError):
        ComplexPoint(math.nan, 0.0)


@pytest.mark.parametrize("z", [0.1, 1 + 1j, -2j, 3.0])
def test_weight_closed_forms(z):
    t = abs(z) ** 2
    assert weight_w_n(z, 1) == pytest.approx(math.exp(-t), rel=1e-13)
    assert weight_w_n(z, 2) == pytest.approx(math.pi * 2 * bessel_k0(2 * math.sqrt(t)), rel=1e-10)


def test_weight_at_origin():
    assert log_weight(0, 1) == 0.0
    assert log_weight(0, 2) == math.inf


@pytest.mark.parametrize("n", [1, 2, 3])
def test_weight_is_probability_after_scaling(n):
    # pi^-n w_n dm integrates to 1; in polar form pi^(1-n) * integral of w_n(sqrt t) dt
    val, _ = integrate.quad(lambda u: math.exp(u + log_weight(math.exp(u / 2), n)), -60, 8, limit=200)
    assert val * math.pi ** (1 - n) == pytest.approx(1.0, rel=1e-7)


def test_kernel_n1_closed_form():
    z, xi = 0.7 + 0.2j, -0.3 + 1.1j
    w = z * xi.conjugate()
    assert kernel(z, xi, EnsembleParams(1, INF)) == pytest.approx(cmath.exp(w), rel=1e-14)
    finite = sum(w**k / math.factorial(k) for k in range(4))
    assert kernel(z, xi, EnsembleParams(1, 4)) == pytest.approx(finite, rel=1e-14)


@settings(max_examples=60, deadline=None)
@given(points, points, st.integers(1, 4), st.sampled_from([1, 3, 8, INF]))
def test_kernel_hermitian(z, xi, n, N):
    params = EnsembleParams(n, N)
    a = kernel(z, xi, params)
    b = kernel(xi, z, params).conjugate()
    assert abs(a - b) <= 1e-12 * max(1.0, abs(a))


@settings(max_examples=40, deadline=None)
@given(st.lists(points, min_size=2, max_size=5, unique=True), st.integers(1, 3), st.randoms(use_true_random=False))
def test_joint_density_permutation_invariant(zs, n, rnd):
    if any(abs(z) < 1e-6 for z in zs):
        return
    perm = zs[:]
    rnd.shuffle(perm)
    a, b = log_joint_density(zs, n), log_joint_density(perm, n)
    assert a == pytest.approx(b, rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("pair", [(0.3 + 0.1j, -0.5 + 0.8j), (1.2, 1.1j), (0.05 - 0.4j, 2.0 + 0.3j)])
def test_two_point_density_is_kernel_determinant(n, pair):
    z1, z2 = pair
    params = EnsembleParams(n, 2)
    w1, w2 = weight_w_n(z1, n), weight_w_n(z2, n)
    scale = math.pi ** (-n)

    def kt(a, b, wa, wb):
        return scale * math.sqrt(wa * wb) * kernel(a, b, params)

    det = kt(z1, z1, w1, w1) * kt(z2, z2, w2, w2) - kt(z1, z2, w1, w2) * kt(z2, z1, w2, w1)
    assert math.exp(log_joint_density([z1, z2], n)) == pytest.approx(det.real, rel=1e-8)
    assert abs(det.imag) < 1e-12


def test_joint_density_coincident_points():
    assert log_joint_density([0.5, 0.5], 1) == -math.inf


@pytest.mark.parametrize("N", range(1, 7))
def test_permanent_against_bruteforce(N):
    rng = np.random.default_rng(N)
    a = rng.normal(size=(N, N))
    assert permanent(a) == pytest.approx(permanent_bruteforce(a), rel=1e-10, abs=1e-12)


def test_permanent_small_cases():
    assert permanent(np.array([[1.0, 2.0], [3.0, 4.0]])) == 10.0
    assert permanent(np.ones((4, 4))) == pytest.approx(24.0)
    with pytest.raises(DomainError):
        permanent(np.ones((2, 3)))


def test_moduli_density_single_point():
    for r in (0.2, 1.0, 2.5):
        assert moduli_joint_density([r], 1) == pytest.approx(2 * r * math.exp(-r * r), rel=1e-13)


def test_moduli_density_symmetric_and_domain():
    assert moduli_joint_density([0.4, 1.3], 2) == pytest.approx(moduli_joint_density([1.3, 0.4], 2), rel=1e-14)
    with pytest.raises(DomainError):
        moduli_joint_density([0.0, 1.0], 1)
    with pytest.raises(DomainError):
        moduli_joint_density([1.0] * 13, 1)


def test_moduli_density_n2_normalized_on_chamber():
    # Gauss-Legendre in u = ln r; the density is symmetric, so the chamber
    # is half the square (diagonal nodes carry weight 1/2)
    x, w = np.polynomial.legendre.leggauss(56)
    lo, hi = -16.0, 3.2
    u = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
    w = 0.5 * (hi - lo) * w * np.exp(u)
    total = 0.0
    for i in range(u.size):
        for j in range(i, u.size):
            f = moduli_joint_density([math.exp(u[i]), math.exp(u[j])], 2) * w[i] * w[j]
            total += 0.5 * f if i == j else f
    assert total == pytest.approx(1.0, rel=1e-6)


@pytest.mark.parametrize("k,n", [(1, 1), (3, 1), (2, 2), (4, 3)])
def test_radial_density_matches_survival_slope(k, n):
    for x in (0.5, 2.0, 7.0):
        h = 1e-4 * x
        slope = -(math.exp(survival_log(k, n, x + h).log_value) - math.exp(survival_log(k, n, x - h).log_value)) / (2 * h)
        assert radial_density(k, n, x) == pytest.approx(slope, rel=1e-4)


def test_radial_density_n1_is_gamma():
    for k, x in itertools.product((1, 2, 5), (0.3, 2.0, 9.0)):
        ref = (k - 1) * math.log(x) - x - math.lgamma(k)
        assert log_radial_density(k, 1, x) == pytest.approx(ref, rel=1e-13, abs=1e-14)


def test_radial_density_domain():
    with pytest.raises(DomainError):
        log_radial_density(0, 1, 1.0)
    with pytest.raises(DomainError):
        log_radial_density(1, 1, 0.0)


@settings(max_examples=40, deadline=None)
@given(points, st.floats(0, 2 * math.pi), st.integers(1, 3))
def test_weight_rotation_invariant(z, phi, n):
    if abs(z) < 1e-3:
        return
    assert weight_w_n(z * 1j, n) == weight_w_n(z, n)
    assert weight_w_n(z * cmath.exp(1j * phi), n) == pytest.approx(weight_w_n(z, n), rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(points, st.integers(1, 3), st.sampled_from([1, 4, INF]))
def test_kernel_at_origin(z, n, N):
    assert kernel(z, 0, EnsembleParams(n, N)) == 1


def test_single_point_density_classical():
    z = 0.6 - 0.9j
    assert log_joint_density([z], 1) == pytest.approx(-math.log(math.pi) - abs(z) ** 2, rel=1e-14)
    val, _ = integrate.dblquad(lambda y, x: math.exp(log_joint_density([complex(x, y)], 1)), -9, 9, -9, 9,
                               epsabs=1e-12, epsrel=1e-10)
    assert val == pytest.approx(1.0, rel=1e-6)


def test_matrix_moduli_histogram_matches_density_marginal():
    draws = 20000
    moduli = sample_eigen_moduli(EnsembleParams(1, 2), draws, seed=21).ravel()
    edges = [0.0, 0.4, 0.8, 1.2, 1.6, 2.2, 6.0]
    for a, b in zip(edges, edges[1:]):
        # pooled modulus law: (1/N!) * integral of the symmetric density over the other coordinate
        p, _ = integrate.dblquad(lambda r2, r1: moduli_joint_density([r1, r2], 1) / 2.0,
                                 max(a, 1e-12), b, 1e-12, 8.0)
        emp = np.mean((moduli >= a) & (moduli < b))
        # draws are the independent units; the per-draw bin fraction has variance <= p(1-p)
        sigma = math.sqrt(p * (1 - p) / draws)
        assert abs(emp - p) <= 3 * sigma


@pytest.mark.parametrize("n", [1, 2, 3])
def test_g_core_moments(n):
    for j in range(1, 7):
        hi = n * math.log(j + 40.0 / n)
        val, _ = integrate.quad(lambda u: math.exp(j * u + g_core(math.exp(u), n).log_value), -60.0, hi,
                                limit=400, epsabs=0.0, epsrel=1e-10)
        assert val == pytest.approx(math.gamma(j) ** n, rel=1e-6)
