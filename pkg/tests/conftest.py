"""Shared oracles for the test suite.

The sympy bridge supplies an independent symbolic-differentiation route: the
package never imports sympy, so any agreement between the two is a real
cross-check, not a tautology.
"""

from __future__ import annotations

import random
from fractions import Fraction

import sympy

from sbtlab.polyalg import RealPoly


def sympy_symbols(k: int):
    return sympy.symbols(f"x1:{k + 1}")


def to_sympy(p: RealPoly, syms):
    expr = sympy.Integer(0)
    for alpha, c in p.terms.items():
        term = sympy.Rational(c.numerator, c.denominator) if isinstance(c, Fraction) \
            else sympy.Float(c)
        for j, e in enumerate(alpha):
            if e:
                term *= syms[j] ** e
        expr += term
    return expr


def from_sympy(expr, syms) -> RealPoly:
    expr = sympy.expand(expr)
    poly = sympy.Poly(expr, *syms)
    terms = {}
    for exps, coeff in poly.terms():
        coeff = sympy.Rational(coeff)
        terms[tuple(int(e) for e in exps)] = Fraction(int(coeff.p), int(coeff.q))
    return RealPoly(terms)


def sympy_hermite(p: RealPoly) -> RealPoly:
    """laplacian - euler by direct symbolic differentiation."""
    k = max(p.width(), 1)
    syms = sympy_symbols(k)
    expr = to_sympy(p, syms)
    out = sum(sympy.diff(expr, x, 2) - x * sympy.diff(expr, x) for x in syms)
    return from_sympy(out, syms)


def sympy_sphere_laplacian(p: RealPoly, n: int, b2) -> RealPoly:
    """Angular-momentum route to the sphere Laplacian.

    Sums the squared rotation generators over all coordinate planes of the
    ambient space; generators involving an unused coordinate x_l (l > k)
    collapse to -x_j d_j + x_l^2 d_j^2, and the sphere constraint replaces
    sum_{l>k} x_l^2 by b^2 - sum_{j<=k} x_j^2.  Completely independent of the
    polar-coordinate closed form used by the package.
    """
    k = max(p.width(), 1)
    assert k < n
    syms = sympy_symbols(k)
    expr = to_sympy(p, syms)
    total = sympy.Integer(0)
    for i in range(k):
        for j in range(i + 1, k):
            gen = lambda f: syms[i] * sympy.diff(f, syms[j]) - syms[j] * sympy.diff(f, syms[i])
            total += gen(gen(expr))
    tail = sympy.Rational(b2 if isinstance(b2, int) else Fraction(b2)) - sum(x ** 2 for x in syms)
    for j in range(k):
        total += (n - k) * (-syms[j] * sympy.diff(expr, syms[j]))
        total += tail * sympy.diff(expr, syms[j], 2)
    return from_sympy(sympy.expand(total / sympy.Rational(Fraction(b2))), syms)


def seeded_rng(seed: int = 1234) -> random.Random:
    return random.Random(seed)
