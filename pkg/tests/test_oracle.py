import math
from fractions import Fraction

import pytest

from sbtlab.measures import MeasureSpec, gamma_moment, gaussian_moment, xi_moment
from sbtlab.oracle import (
    InsufficientOrderError,
    isserlis_moment,
    mc_sphere_moment,
    quad_gauss_moment,
)
from sbtlab.polyalg import CxPoly, RealPoly
from sbtlab.suite import random_real_poly

from conftest import seeded_rng

X1 = RealPoly.variable(0)
X2 = RealPoly.variable(1)
A1 = CxPoly.a(0)
ABAR1 = CxPoly.abar(0)


# ---------------------------------------------------------------------------
# pair-partition enumeration


def test_isserlis_examples():
    assert isserlis_moment(X1 ** 4, Fraction(1)) == 3  # three pairings
    t = Fraction(5, 7)
    assert isserlis_moment(X1 ** 4, t) == 3 * t ** 2
    assert isserlis_moment(X1 ** 2 * X2 ** 2, t) == t ** 2  # one pairing per axis
    assert isserlis_moment(X1 ** 3, t) == 0


def test_isserlis_equals_heat_route_exactly():
    rng = seeded_rng(51)
    for _ in range(10):
        p = random_real_poly(rng, k=4, degree=10, terms=5)
        t = Fraction(rng.randint(1, 5), rng.randint(1, 3))
        assert isserlis_moment(p, t) == gaussian_moment(p, t)


# ---------------------------------------------------------------------------
# quadrature


def test_quadrature_gamma_example():
    est = quad_gauss_moment(A1 * ABAR1, MeasureSpec.gamma(1.0), 4)
    assert complex(est.value).real == pytest.approx(math.e, rel=1e-13)
    assert est.std_error == 0.0


def test_quadrature_gauss_example():
    est = quad_gauss_moment(X1 ** 4, MeasureSpec.gauss(1), 3)
    assert est.value == pytest.approx(3.0, rel=1e-13)


def test_quadrature_gamma_variance_difference():
    for T in (0.5, 2.0):
        est = quad_gauss_moment(A1 ** 2, MeasureSpec.gamma(T), 4)
        assert complex(est.value) == pytest.approx(1.0, rel=1e-12)


def test_quadrature_matches_analytic_routes():
    q = A1 ** 3 * ABAR1 + A1 * ABAR1 ** 3 + 2 * A1 * ABAR1
    order = q.degree() // 2 + 1
    for T in (0.5, 1.5):
        est = quad_gauss_moment(q, MeasureSpec.gamma(T), order)
        assert complex(est.value) == pytest.approx(
            complex(gamma_moment(q, T)), rel=1e-12
        )
    est = quad_gauss_moment(q, MeasureSpec.xi(1.0, 0.8), order)
    assert complex(est.value) == pytest.approx(
        complex(xi_moment(q.to_float(), 1.0, 0.8)), rel=1e-12
    )


def test_quadrature_insufficient_order_flagged():
    with pytest.raises(InsufficientOrderError):
        quad_gauss_moment(X1 ** 6, MeasureSpec.gauss(1), 3)


# ---------------------------------------------------------------------------
# Monte Carlo


def test_mc_sphere_examples_within_three_sigma():
    n = 50
    est = mc_sphere_moment(X1 ** 2, n, samples=300_000, seed=7)
    assert abs(est.value - 1.0) <= 3 * est.std_error
    est = mc_sphere_moment(X1 ** 4, n, samples=300_000, seed=7)
    assert abs(est.value - 3 * n / (n + 2)) <= 3 * est.std_error
    est = mc_sphere_moment(X1 * X2, n, samples=300_000, seed=7)
    assert abs(est.value) <= 3 * max(est.std_error, 1e-12)


def test_mc_deterministic_given_seed():
    a = mc_sphere_moment(X1 ** 4, 20, samples=50_000, seed=123)
    b = mc_sphere_moment(X1 ** 4, 20, samples=50_000, seed=123)
    assert a == b
    c = mc_sphere_moment(X1 ** 4, 20, samples=50_000, seed=124)
    assert c.value != a.value


def test_mc_independent_of_thread_count(monkeypatch):
    a = mc_sphere_moment(X1 ** 2 * X2 ** 2, 15, samples=40_000, seed=5)
    monkeypatch.setenv("SBTLAB_THREADS", "1")
    b = mc_sphere_moment(X1 ** 2 * X2 ** 2, 15, samples=40_000, seed=5)
    assert a.value == b.value and a.std_error == b.std_error


def test_mc_rejects_tiny_sample_counts():
    with pytest.raises(ValueError):
        mc_sphere_moment(X1, 5, samples=10, seed=0)
