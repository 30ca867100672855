"""Independent brute-force cross-checks for the moment machinery.

Nothing here shares code with the analytic moment routes: sphere moments are
re-estimated by Monte Carlo on Gaussian directions, Gaussian-family moments
by tensorized Gauss-Hermite quadrature, and real Gaussian moments by direct
enumeration of pair partitions.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .measures import MeasureSpec
from .parallel import ordered_map
from .polyalg import CxPoly, RealPoly, mono_degree

N_SUBSTREAMS = 16


class InsufficientOrderError(ValueError):
    """Raised when a quadrature order cannot integrate the polynomial exactly."""


@dataclass(frozen=True)
class OracleEstimate:
    """A brute-force value with its uncertainty; deterministic given the seed."""

    value: object
    std_error: float
    samples: int
    seed: int | None = None


# ---------------------------------------------------------------------------
# Monte Carlo on the sphere


def mc_sphere_moment(p: RealPoly, n: int, samples: int = 1_000_000,
                     seed: int = 0, chunk: int = 1 << 16) -> OracleEstimate:
    """Average p over points sampled uniformly from the radius-sqrt(n) sphere.

    Gaussian vectors in n dimensions are rescaled to the sphere.  Sampling is
    split into a fixed number of counter-based substreams, so the estimate
    depends only on (samples, seed), not on how the work is scheduled.
    """
    if samples < 1000:
        raise ValueError("need at least 1000 samples")
    if p.width() > n:
        raise ValueError(f"polynomial in {p.width()} variables on an S^{n - 1}")
    k = max(p.width(), 1)
    per = [samples // N_SUBSTREAMS] * N_SUBSTREAMS
    per[-1] += samples - sum(per)

    def run_substream(args):
        idx, count = args
        rng = np.random.Generator(np.random.Philox(key=[seed, idx]))
        total = 0.0
        total_sq = 0.0
        left = count
        while left > 0:
            size = min(chunk, left)
            x = rng.standard_normal((size, n))
            radius = np.sqrt((x * x).sum(axis=1))
            pts = x[:, :k] * (math.sqrt(n) / radius)[:, None]
            vals = p.eval_array(pts)
            total += float(vals.sum())
            total_sq += float((vals * vals).sum())
            left -= size
        return total, total_sq

    parts = ordered_map(run_substream, list(enumerate(per)))
    total = sum(t for t, _ in parts)
    total_sq = sum(s for _, s in parts)
    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0)
    return OracleEstimate(mean, math.sqrt(var / samples), samples, seed)


# ---------------------------------------------------------------------------
# tensor Gauss-Hermite quadrature

MAX_QUAD_POINTS = 4_000_000


def _grid(sigmas, order):
    nodes, weights = np.polynomial.hermite_e.hermegauss(order)
    weights = weights / math.sqrt(2.0 * math.pi)
    axes_pts = [sigma * nodes for sigma in sigmas]
    pts = np.array(list(itertools.product(*axes_pts)))
    wts = np.array([math.prod(ws) for ws in itertools.product(*([weights] * len(sigmas)))])
    return pts, wts


def quad_gauss_moment(q, family: MeasureSpec, order: int) -> OracleEstimate:
    """Moment of q under a Gaussian family by variance-matched quadrature.

    Exact (up to round-off) once order > degree/2, so the reported
    uncertainty is zero; lower orders are rejected.
    """
    degree = q.degree()
    if order < degree // 2 + 1:
        raise InsufficientOrderError(
            f"order {order} cannot integrate degree {degree} exactly"
        )
    if family.family == "gauss":
        if not isinstance(q, RealPoly):
            raise TypeError("gauss quadrature takes real polynomials")
        k = max(q.width(), 1)
        if order ** k > MAX_QUAD_POINTS:
            raise ValueError(f"quadrature grid of {order}^{k} points is too large")
        sigma = math.sqrt(float(family.t))
        pts, wts = _grid([sigma] * k, order)
        value = float(np.dot(wts, q.eval_array(pts)))
        return OracleEstimate(value, 0.0, order)
    if family.family == "xi":
        var_u = (2.0 * float(family.s) - float(family.t)) / 2.0
        var_v = float(family.t) / 2.0
    elif family.family == "gamma":
        var_u = (math.exp(float(family.T)) + 1.0) / 2.0
        var_v = (math.exp(float(family.T)) - 1.0) / 2.0
    else:
        raise ValueError(f"no quadrature for family {family.family!r}")
    if not isinstance(q, CxPoly):
        raise TypeError("complex-family quadrature takes complexified polynomials")
    k = max(q.width(), 1)
    if order ** (2 * k) > MAX_QUAD_POINTS:
        raise ValueError(f"quadrature grid of {order}^{2 * k} points is too large")
    sigmas = [math.sqrt(var_u)] * k + [math.sqrt(var_v)] * k
    pts, wts = _grid(sigmas, order)
    z = pts[:, :k] + 1j * pts[:, k:]
    value = complex(np.dot(wts, q.eval_array(z)))
    return OracleEstimate(value, 0.0, order)


# ---------------------------------------------------------------------------
# pair-partition enumeration


@lru_cache(maxsize=None)
def _matching_count(labels: tuple) -> int:
    """Number of perfect matchings of the label multiset pairing equal labels.

    Pairs of unequal labels carry zero covariance and are pruned.
    """
    if not labels:
        return 1
    first, rest = labels[0], labels[1:]
    total = 0
    for i, other in enumerate(rest):
        if other == first:
            total += _matching_count(rest[:i] + rest[i + 1 :])
    return total


def isserlis_moment(p: RealPoly, t):
    """Gaussian moment of p by summing over pair partitions of each monomial.

    Exact for exact p and rational t; independent of the heat-operator route.
    """
    exact = p.mode == "exact" and isinstance(t, (int, Fraction))
    total = Fraction(0) if exact else 0.0
    for alpha, c in p.terms.items():
        degree = mono_degree(alpha)
        if degree % 2:
            continue
        labels = tuple(
            j for j, e in enumerate(alpha) for _ in range(e)
        )
        count = _matching_count(labels)
        if not count:
            continue
        weight = (Fraction(t) if exact else float(t)) ** (degree // 2)
        total = total + (c if exact else float(c)) * count * weight
    return total
