"""Kernels and boundary profiles checked against direct quadrature."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from frobscope.kernels import (
    KernelMode,
    KernelSpec,
    jackson,
    jackson_hat,
    jackson_hilbert,
    jackson_tail,
    kernel_hat,
    profile,
    _sin4_tail,
)

ONE_D = KernelSpec(KernelMode.PRODUCT_JACKSON, 1)
PROD_2D = KernelSpec(KernelMode.PRODUCT_JACKSON, 2)
RAD_2D = KernelSpec(KernelMode.RADIAL_CGT, 2)


def numeric_ft(xi):
    # K1 is even, so its transform is 2 int_0^inf K1 cos(2 pi xi x); the sinc^4 tail beyond 2000 is < 1e-10
    f = lambda x: jackson(x) * math.cos(2 * math.pi * xi * x)
    total = 0.0
    for a in range(0, 2000, 20):
        total += integrate.quad(f, a, a + 20, limit=200, epsabs=1e-14)[0]
    return 2.0 * total


@pytest.mark.parametrize("xi", [0.0, 0.1, 0.25, 0.5, 0.7, 0.95])
def test_jackson_hat_matches_numeric_fourier_integral(xi):
    assert abs(float(jackson_hat(xi)) - numeric_ft(xi)) < 1e-8


def test_kernel_hat_normalization_and_support():
    assert kernel_hat(ONE_D, 0, 16) == pytest.approx(1.0)
    assert kernel_hat(ONE_D, 16, 16) == 0.0
    assert kernel_hat(PROD_2D, [0, 0], 8) == pytest.approx(1.0)
    assert kernel_hat(PROD_2D, [8, 3], 8) == 0.0
    assert kernel_hat(RAD_2D, [0, 0], 8) == pytest.approx(1.0, abs=1e-10)
    assert kernel_hat(RAD_2D, [6, 6], 8) == 0.0


def test_jackson_value_at_half_degree():
    # the triangle autoconvolution gives 2 (1 - 1/2)^3 = 1/4 at xi = 1/2
    assert float(kernel_hat(ONE_D, 8, 16)) == pytest.approx(0.25, abs=1e-15)


def test_radial_transform_vanishes_near_unit_sphere():
    prof = profile(RAD_2D)
    vals = prof.kernel_hat_radial(np.array([0.0, 0.3, 0.6, 0.9, 0.999]))
    assert np.all(np.diff(vals) <= 1e-12)
    assert vals[-1] < 1e-9


def test_radial_transform_matches_direct_2d_integral():
    prof = profile(RAD_2D)
    xi = 0.4
    f = lambda r: 2 * math.pi * r * prof.kernel_radial(r) * __import__("scipy").special.j0(2 * math.pi * xi * r)
    direct = sum(integrate.quad(f, a, a + 10, limit=200)[0] for a in range(0, 400, 10))
    assert float(prof.kernel_hat_radial(xi)[0]) == pytest.approx(direct, abs=1e-8)


def test_tail_at_zero_is_full_mass():
    assert float(_sin4_tail(0.0)[0]) == pytest.approx(math.pi / 3, abs=1e-14)
    assert float(jackson_tail(0.0)) == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("s", [0.1, 0.5, 1.0, 2.0, 7.5])
def test_jackson_tail_matches_quadrature(s):
    direct = 2 * sum(integrate.quad(jackson, a, a + 1, limit=100)[0] for a in np.arange(s, s + 4000, 1.0))
    assert float(jackson_tail(s)) == pytest.approx(direct, abs=1e-9)


@pytest.mark.parametrize("spec", [ONE_D, PROD_2D, RAD_2D], ids=["jackson1", "product2", "radial2"])
def test_psi_at_zero_exceeds_prefactor(spec):
    prof = profile(spec)
    assert float(np.ravel(prof.psi(0.0))[0]) >= 4 * math.exp(2 * math.pi)
    # psi decreases
    u = np.linspace(0, 6, 25)
    assert np.all(np.diff(prof.psi(u)) <= 1e-9)


def test_psi_constants_frozen():
    # C = 4 e^{2 pi} / int_{|x| <= 1} K, evaluated with the independent quadrature in the tests above
    inside = integrate.quad(jackson, -1, 1)[0]
    assert profile(ONE_D).C == pytest.approx(4 * math.exp(2 * math.pi) / inside, rel=1e-12)
    assert profile(ONE_D).C == pytest.approx(2255.1199747, rel=1e-9)
    inside2 = integrate.dblquad(lambda y, x: jackson(x) * jackson(y), -1, 1,
                                lambda x: -math.sqrt(1 - x * x), lambda x: math.sqrt(1 - x * x))[0]
    assert profile(PROD_2D).C == pytest.approx(4 * math.exp(2 * math.pi) / inside2, rel=1e-7)


def _mp_hilbert(xi):
    import mpmath as mp

    mp.mp.dps = 30

    def f(e):
        a = abs(e)
        return 1 - 6 * a**2 + 6 * a**3 if a <= 0.5 else (2 * (1 - a) ** 3 if a < 1 else 0)

    xi = mp.mpf(xi)
    g = lambda e: (f(e) - f(xi)) / (xi - e) if e != xi else 0
    pts = sorted({mp.mpf(-1), mp.mpf(-0.5), mp.mpf(0), mp.mpf(0.5), mp.mpf(1), xi})
    return float(mp.quad(g, pts) + f(xi) * mp.log(abs((xi + 1) / (xi - 1))))


@pytest.mark.parametrize("xi", [0.05, 0.3, 0.5, 0.8, 1.7, 4.0])
def test_hilbert_transform_matches_principal_value(xi):
    assert float(jackson_hilbert(xi)[0]) == pytest.approx(_mp_hilbert(xi), abs=1e-12)


@pytest.mark.parametrize("omega", [0.0, 0.2, 1.0, 3.0, 9.0])
def test_one_dim_half_line_transforms(omega):
    prof = profile(ONE_D)
    f = lambda u: float(np.ravel(prof.psi(u))[0])
    c = sum(integrate.quad(lambda u: f(u) * math.cos(omega * u), a, a + 2, limit=200)[0] for a in range(0, 2000, 2))
    s = sum(integrate.quad(lambda u: f(u) * math.sin(omega * u), a, a + 2, limit=200)[0] for a in range(0, 2000, 2))
    assert float(prof.cos_transform(omega)[0]) == pytest.approx(c, abs=2e-4 * prof.C)
    assert float(prof.sin_transform(omega)[0]) == pytest.approx(s, abs=2e-4 * prof.C)


@pytest.mark.parametrize("spec", [PROD_2D, RAD_2D], ids=["product2", "radial2"])
def test_two_dim_cos_transform_matches_quadrature(spec):
    prof = profile(spec)
    u = np.linspace(0, 120, 6001)
    psi = prof.psi(u)
    for omega in (0.0, 0.7, 2.5):
        direct = integrate.simpson(psi * np.cos(omega * u), x=u)
        assert float(prof.cos_transform(omega)[0]) == pytest.approx(direct, rel=1e-4, abs=1e-3)


def test_product_tail_matches_circle_density_integral():
    prof = profile(PROD_2D)
    r = np.linspace(1.0, 120.0, 11901)
    direct = integrate.simpson(prof.circle_density(r), x=r)
    assert float(np.ravel(prof.tail(1.0))[0]) == pytest.approx(direct, rel=1e-5)


@pytest.mark.parametrize("spec", [ONE_D, PROD_2D, RAD_2D], ids=["jackson1", "product2", "radial2"])
@pytest.mark.parametrize("M", [4, 16])
def test_periodic_kernel_nonnegative(spec, M):
    n = spec.n
    ks = np.stack(np.meshgrid(*[np.arange(-M, M + 1)] * n, indexing="ij"), -1).reshape(-1, n)
    coef = kernel_hat(spec, ks, M)
    x = np.random.default_rng(M).random((10_000, n))
    vals = np.cos(2 * np.pi * x @ ks.T) @ coef
    assert vals.min() >= -1e-12


@settings(max_examples=50, deadline=None)
@given(st.floats(-3, 3))
def test_kernel_hat_bounded(xi):
    v = float(jackson_hat(xi))
    assert 0.0 <= v <= 1.0
