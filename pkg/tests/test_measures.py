import math
from fractions import Fraction

import pytest

from sbtlab import oracle
from sbtlab.diffops import DimensionError
from sbtlab.measures import (
    MeasureSpec,
    gamma_moment,
    gaussian_moment,
    inner_product,
    moment,
    quadric_moment,
    quadric_moment_direct,
    sphere_mono_moment,
    sphere_moment,
    xi_moment,
)
from sbtlab.polyalg import CxPoly, GaussianRational, RealPoly, holomorphic_extend
from sbtlab.suite import random_real_poly

from conftest import seeded_rng

X1 = RealPoly.variable(0)
X2 = RealPoly.variable(1)
A1 = CxPoly.a(0)
A2 = CxPoly.a(1)
ABAR1 = CxPoly.abar(0)


# ---------------------------------------------------------------------------
# gaussian


def test_gaussian_moment_examples():
    assert gaussian_moment(X1 ** 2, 1) == 1
    # quartic value cross-checked by quadrature below
    assert gaussian_moment(X1 ** 4, 1) == 3
    assert gaussian_moment(X1 * X2, Fraction(7, 3)) == 0


def test_gaussian_moment_agrees_with_quadrature_oracle():
    rng = seeded_rng(31)
    for _ in range(4):
        p = random_real_poly(rng, k=2, degree=6, terms=4)
        t = 1.25
        direct = float(gaussian_moment(p.to_float(), t))
        est = oracle.quad_gauss_moment(p, MeasureSpec.gauss(t), p.degree() // 2 + 1)
        assert direct == pytest.approx(est.value, rel=1e-12, abs=1e-12)


def test_gaussian_moment_scales_with_variance():
    assert gaussian_moment(X1 ** 4, Fraction(2)) == 12  # 3 t^2


# ---------------------------------------------------------------------------
# xi


def test_xi_moment_examples():
    assert xi_moment(A1 * ABAR1, 1, 1) == GaussianRational(1)
    assert xi_moment(A1, Fraction(3, 2), 2) == GaussianRational(0)
    assert xi_moment(A1 ** 2, 1, Fraction(1, 2)) == GaussianRational(Fraction(1, 2))


def test_xi_moment_agrees_with_quadrature_oracle():
    q = (A1 + 1) * (ABAR1 + 2) * A1 + (A1 * A2) ** 2
    s, t = 1.0, 0.75
    direct = complex(xi_moment(q.to_float(), s, t))
    est = oracle.quad_gauss_moment(q, MeasureSpec.xi(s, t), q.degree() // 2 + 1)
    assert direct == pytest.approx(complex(est.value), rel=1e-12, abs=1e-12)


def test_xi_moment_validates_parameters():
    with pytest.raises(ValueError):
        xi_moment(A1, 1, 2)
    with pytest.raises(ValueError):
        xi_moment(A1, 1, 0)


# ---------------------------------------------------------------------------
# gamma


def test_gamma_moment_second_moment_is_e_to_T():
    # the analytic route gives exactly exp(T); the quadrature oracle agrees,
    # pinning the normalization (a doubled value would break unitarity too)
    for T in (0.5, 1.0, 2.0):
        direct = complex(gamma_moment(A1 * ABAR1, T))
        assert direct.real == pytest.approx(math.exp(T), rel=1e-14)
        assert direct.imag == 0
        est = oracle.quad_gauss_moment(A1 * ABAR1, MeasureSpec.gamma(T), 3)
        assert complex(est.value) == pytest.approx(direct, rel=1e-12)


def test_gamma_moment_examples():
    assert complex(gamma_moment(A1 ** 2, 1.0)) == pytest.approx(1.0, rel=1e-14)
    assert gamma_moment(ABAR1, 2.0) == 0
    assert gamma_moment(CxPoly.constant(1), 0.3) == pytest.approx(1.0)


def test_gamma_is_xi_at_shifted_parameters():
    # gamma_T coincides with xi at (s, t) = (e^T, e^T - 1)
    q = A1 ** 2 * ABAR1 ** 2 + A1 * ABAR1 + 2
    T = 0.8
    a = complex(gamma_moment(q.to_float(), T))
    b = complex(xi_moment(q.to_float(), math.exp(T), math.exp(T) - 1))
    assert a == pytest.approx(b, rel=1e-13)


def test_gamma_matches_dilated_xi():
    rng = seeded_rng(32)
    for T in (0.4, 1.1):
        for _ in range(3):
            p = random_real_poly(rng, k=2, degree=3, terms=4)
            q = holomorphic_extend(p).to_float()
            integrand = q * q.conjugate()
            a = complex(gamma_moment(integrand, T))
            b = complex(
                xi_moment(integrand.dilate(math.exp(T / 2)), 1.0, 1.0 - math.exp(-T))
            )
            assert a == pytest.approx(b, rel=1e-12)


# ---------------------------------------------------------------------------
# sphere


def test_sphere_moment_examples():
    n = 50
    assert sphere_moment(X1 ** 2, n) == 1
    assert sphere_moment(X1 ** 4, n) == Fraction(3 * n, n + 2)
    assert sphere_moment(X1 ** 2 * X2 ** 2, n) == Fraction(n, n + 2)


def test_sphere_moment_against_monte_carlo_oracle():
    n = 30
    for p in (X1 ** 2, X1 ** 4, X1 ** 2 * X2 ** 2, X1 * X2):
        est = oracle.mc_sphere_moment(p, n, samples=400_000, seed=99)
        ref = float(sphere_moment(p, n))
        assert abs(est.value - ref) <= 4 * max(est.std_error, 1e-12)


def test_sphere_moment_odd_exponent_vanishes():
    assert sphere_moment(X1 ** 3 * X2 ** 2, 12) == 0
    assert sphere_mono_moment((1, 4), 9, 9) == 0


def test_sphere_moment_exact_at_large_n():
    n = 10 ** 6
    assert sphere_moment(X1 ** 4, n) == Fraction(3 * n, n + 2)


def test_sphere_moment_dimension_check():
    with pytest.raises(DimensionError):
        sphere_moment(RealPoly({(1, 1, 1, 1): 1}), 3)


def test_sphere_general_radius():
    # radius-b moments scale by b^degree
    assert sphere_moment(X1 ** 2, 5, Fraction(9)) == Fraction(9, 5)


# ---------------------------------------------------------------------------
# quadric


def test_quadric_moment_eigenvector_chain():
    for n, T in [(5, 0.5), (10, 1.0), (25, 2.0)]:
        got = quadric_moment(A1 * ABAR1, n, T)
        assert got.real == pytest.approx(math.exp(T * (n - 1) / n), rel=1e-12)
        assert got.imag == pytest.approx(0.0, abs=1e-13)
        assert quadric_moment(A1 ** 2, n, T).real == pytest.approx(1.0, rel=1e-12)
        assert quadric_moment(CxPoly.constant(1), n, T) == pytest.approx(1.0)


def test_quadric_moment_matches_direct_route():
    q = A1 ** 2 * ABAR1 + A2 * ABAR1 ** 2 + A1 * ABAR1 - 3
    for n in (5, 8):
        fast = quadric_moment(q, n, 0.7)
        slow = quadric_moment_direct(q, n, 0.7)
        assert fast == pytest.approx(slow, rel=1e-11, abs=1e-11)


def test_quadric_moment_dimension_check():
    with pytest.raises(DimensionError):
        quadric_moment(A1 * A2, 2, 1.0)


def test_quadric_moment_converges_to_gamma():
    q = A1 ** 2 * ABAR1 ** 2
    T = 0.6
    limit = complex(gamma_moment(q, T))
    prev = None
    for n in (10, 100, 1000):
        err = abs(quadric_moment(q, n, T) - limit)
        if prev is not None:
            assert err < prev / 5  # roughly first-order decay
        prev = err


# ---------------------------------------------------------------------------
# shared properties


def test_all_families_are_probability_measures():
    one_r = RealPoly.constant(1)
    one_c = CxPoly.constant(1)
    assert gaussian_moment(one_r, Fraction(1, 2)) == 1
    assert xi_moment(one_c, 1, 1) == GaussianRational(1)
    assert complex(gamma_moment(one_c, 1.0)) == pytest.approx(1.0)
    assert sphere_moment(one_r, 6) == 1
    assert quadric_moment(one_c, 6, 1.0) == pytest.approx(1.0)


def test_odd_symmetry_annihilation():
    assert gaussian_moment(X1 ** 3, 1) == 0
    assert xi_moment(A1 ** 2 * ABAR1, 1, 1) == GaussianRational(0)
    assert complex(gamma_moment(A1 ** 3 * ABAR1 ** 2, 1.0)) == 0
    assert sphere_moment(X1 * X2 ** 2, 8) == 0


def test_moments_ignore_ambient_variable_count():
    # a polynomial of the first variable integrates identically however many
    # ambient coordinates the measure formally carries
    p_narrow = RealPoly({(2,): 1})
    p_wide = RealPoly({(2, 0, 0): 1})
    assert gaussian_moment(p_narrow, 1) == gaussian_moment(p_wide, 1)
    assert xi_moment(holomorphic_extend(p_narrow), 1, 1) == xi_moment(
        holomorphic_extend(p_wide), 1, 1
    )


def test_inner_product_examples():
    n = 12
    assert inner_product(X1, X1, MeasureSpec.sphere(n)) == 1
    T = 0.9
    val = inner_product(A1.to_float(), A1.to_float(), MeasureSpec.gamma(T))
    assert complex(val).real == pytest.approx(math.exp(T), rel=1e-13)
    q = A1 ** 2 + 2
    assert inner_product(q, CxPoly.constant(1), MeasureSpec.xi(1, 1)) == xi_moment(q, 1, 1)


def test_inner_product_hermitian_and_positive():
    q1 = (A1 ** 2 - A2).to_float()
    q2 = (A1 + 3).to_float()
    spec = MeasureSpec.gamma(0.7)
    a = complex(inner_product(q1, q2, spec))
    b = complex(inner_product(q2, q1, spec))
    assert a == pytest.approx(b.conjugate(), rel=1e-12)
    assert complex(inner_product(q1, q1, spec)).real > 0


def test_measure_spec_validation():
    with pytest.raises(ValueError):
        MeasureSpec.gauss(0)
    with pytest.raises(ValueError):
        MeasureSpec.xi(1, 2)
    with pytest.raises(ValueError):
        MeasureSpec.gamma(-1)
    with pytest.raises(ValueError):
        MeasureSpec.sphere(1)
    with pytest.raises(ValueError):
        MeasureSpec.quadric(4, 0)


def test_measure_spec_json_round_trip():
    specs = [
        MeasureSpec.gauss(Fraction(1, 2)),
        MeasureSpec.xi(1.0, 0.5),
        MeasureSpec.gamma(2.0),
        MeasureSpec.sphere(10),
        MeasureSpec.quadric(10, 1.5),
    ]
    for spec in specs:
        assert MeasureSpec.from_json(spec.to_json()) == spec


def test_moment_dispatcher_matches_direct_calls():
    p = X1 ** 2
    q = A1 * ABAR1
    assert moment(MeasureSpec.gauss(1), p) == gaussian_moment(p, 1)
    assert moment(MeasureSpec.sphere(9), p) == sphere_moment(p, 9)
    assert moment(MeasureSpec.gamma(1.0), q) == gamma_moment(q, 1.0)


def test_sphere_moments_converge_to_gaussian_first_order_up_to_degree_8():
    # scaled errors stay bounded and settle to a finite constant, the
    # signature of exact first-order decay (constant ~1260 for x1^8)
    for p in (X1 ** 4, X1 ** 6, X1 ** 8, X1 ** 4 * X2 ** 4, X1 ** 2 * X2 ** 2):
        limit = gaussian_moment(p, 1)
        scaled = [abs(sphere_moment(p, n) - limit) * n for n in (10, 100, 1000, 10000)]
        assert max(scaled) < 1500
        assert float(scaled[-1]) == pytest.approx(float(scaled[-2]), rel=0.05)


def test_quadric_routes_agree_through_collision_fallback():
    # mod-square-style integrand of bidegree (4, 4) at ambient dimension 5:
    # the direct route exponentiates a matrix with colliding degree blocks,
    # the kernel route never collides; they must agree regardless
    q = ((A1 + 1) ** 2 * (A2 + 2) ** 2).mod_square()
    fast = quadric_moment(q, 5, 0.6)
    slow = quadric_moment_direct(q, 5, 0.6)
    assert fast == pytest.approx(slow, rel=1e-9)


def test_gamma_dilation_identity_on_mixed_polynomials():
    # holds for arbitrary integrands, not only mod squares
    T = 0.9
    q = (A1 ** 3 * ABAR1 + 2 * A1 * ABAR1 ** 3 + A2 ** 2).to_float() - (
        A1 * ABAR1
    ).to_float().scale(1j)
    a = complex(gamma_moment(q, T))
    b = complex(xi_moment(q.dilate(math.exp(T / 2)), 1.0, 1.0 - math.exp(-T)))
    assert a == pytest.approx(b, rel=1e-12)


def test_quadric_moment_satisfies_generator_derivative_identity():
    # d/dT of the moment equals 1/n times the moment of the flowed generator
    # image; checked by central differences, an ODE-level cross-check that is
    # independent of both computational routes
    from sbtlab.diffops import gamma_n

    n = 6
    q = (A1 + 1).mod_square() * (A2.mod_square() + 1)
    t0, h = 0.8, 1e-5
    lhs = (
        complex(quadric_moment(q, n, t0 + h)) - complex(quadric_moment(q, n, t0 - h))
    ) / (2 * h)
    rhs = complex(quadric_moment(gamma_n(q, n, n), n, t0)) / n
    assert lhs == pytest.approx(rhs, rel=1e-8)
