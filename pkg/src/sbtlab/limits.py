"""Large-dimension convergence experiments with rate fitting.

Every experiment sweeps an ambient-dimension grid, compares a finite-n
quantity against its limit, and fits the decay exponent rho in
error ~ C * n^{-rho} by least squares on the log-log points.  The limits
come from the operator and measure modules; the observed first-order rates
are empirical readings of the experiments, not asserted constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import diffops, measures, transforms
from .parallel import ordered_map
from .polyalg import CxPoly, RealPoly, coeff_distance

DEFAULT_N_GRID = (10, 30, 100, 300, 1000, 3000, 10000)

# float differences below this are indistinguishable from round-off and are
# treated as exact agreement
NOISE_FLOOR = 1e-14


def fit_rate(ns, errors, floor: float = NOISE_FLOOR) -> float:
    """Least-squares decay exponent of errors vs ns; inf for exact agreement."""
    pairs = [(n, e) for n, e in zip(ns, errors) if e > floor]
    if not pairs:
        return math.inf
    if len(pairs) < 3:
        if max(e for _, e in pairs) < 1e-12:
            return math.inf
        raise ValueError("need at least 3 grid points with errors above the floor")
    logs_n = np.log([n for n, _ in pairs])
    logs_e = np.log([e for _, e in pairs])
    slope = np.polyfit(logs_n, logs_e, 1)[0]
    return float(-slope)


@dataclass
class ConvergenceTable:
    """Per-dimension values against a fixed reference, with a fitted rate."""

    quantity: str
    ns: tuple
    values: list
    references: list
    errors: list
    fitted_rate: float
    reference_label: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if any(a >= b for a, b in zip(self.ns, self.ns[1:])):
            raise ValueError("dimension grid must be strictly increasing")
        if any(e < 0 for e in self.errors):
            raise ValueError("errors must be nonnegative")

    def csv_rows(self) -> list:
        rows = []
        t = self.meta.get("T", "")
        for n, value, ref, err in zip(self.ns, self.values, self.references, self.errors):
            rows.append(
                {
                    "N": n,
                    "T": t,
                    "quantity": self.quantity,
                    "value": value,
                    "reference": ref,
                    "abs_error": err,
                    "rel_error": "",
                }
            )
        return rows

    def to_json_obj(self) -> dict:
        return {
            "quantity": self.quantity,
            "reference_label": self.reference_label,
            "meta": dict(self.meta),
            "rows": [
                {"N": n, "value": _jsonable(v), "reference": _jsonable(r), "abs_error": e}
                for n, v, r, e in zip(self.ns, self.values, self.references, self.errors)
            ],
            # the rate is an observation of this run, not an asserted constant
            "fitted_rate": _rate_marker(self.fitted_rate),
        }


def _rate_or_nan(ns, errors):
    """Fitted rate, or NaN when the grid has too few informative points."""
    try:
        return fit_rate(ns, errors)
    except ValueError:
        return math.nan


def _jsonable(v):
    if isinstance(v, complex):
        return {"re": v.real, "im": v.imag}
    return v


def _rate_marker(rate: float):
    if math.isinf(rate):
        return "inf"
    if math.isnan(rate):
        return "nan"
    return rate


def laplacian_limit(p: RealPoly, ns=DEFAULT_N_GRID) -> ConvergenceTable:
    """Coefficient distance between the sphere Laplacian of p and its limit."""
    reference = diffops.hermite(p)

    def one(n):
        return float(coeff_distance(diffops.spherical_laplacian(p, n, n), reference))

    errors = ordered_map(one, ns)
    return ConvergenceTable(
        quantity="laplacian-to-hermite",
        ns=tuple(ns),
        values=list(errors),
        references=[0.0] * len(ns),
        errors=list(errors),
        fitted_rate=_rate_or_nan(ns, errors),
        reference_label=str(reference),
    )


def measure_limit(q, family: str, T=None, ns=DEFAULT_N_GRID) -> ConvergenceTable:
    """Finite-n sphere or quadric moments of q against the Gaussian limit."""
    if family == "sphere":
        if not isinstance(q, RealPoly):
            raise TypeError("sphere moments take real polynomials")
        limit = float(measures.gaussian_moment(q, 1))

        def one(n):
            return float(measures.sphere_moment(q, n))

    elif family == "quadric":
        if not isinstance(q, CxPoly):
            raise TypeError("quadric moments take complexified polynomials")
        if T is None:
            raise ValueError("quadric moments need T")
        limit = complex(measures.gamma_moment(q, T))

        def one(n):
            return complex(measures.quadric_moment(q, n, T))

    else:
        raise ValueError(f"unknown measure family {family!r} (want sphere or quadric)")

    values = ordered_map(one, ns)
    errors = [abs(v - limit) for v in values]
    return ConvergenceTable(
        quantity=f"{family}-moment",
        ns=tuple(ns),
        values=values,
        references=[limit] * len(ns),
        errors=errors,
        fitted_rate=_rate_or_nan(ns, errors),
        reference_label=f"limit moment {limit}",
        meta={} if T is None else {"T": T},
    )


def transform_limit(p: RealPoly, T, ns=DEFAULT_N_GRID) -> ConvergenceTable:
    """Coefficient distance between the sphere transform of p and its limit."""
    reference = transforms.limit_sbt(p, T)

    def one(n):
        return float(coeff_distance(transforms.sphere_sbt(p, n, T), reference))

    errors = ordered_map(one, ns)
    return ConvergenceTable(
        quantity="transform-to-limit",
        ns=tuple(ns),
        values=list(errors),
        references=[0.0] * len(ns),
        errors=list(errors),
        fitted_rate=_rate_or_nan(ns, errors),
        reference_label=str(reference),
        meta={"T": T},
    )


@dataclass(frozen=True)
class DiagramReport:
    """The three squared norms of the commuting square at one dimension."""

    n: int
    T: float
    sphere_norm2: float
    quadric_norm2: float
    gamma_norm2: float

    @property
    def finite_gap_rel(self) -> float:
        gap = abs(self.sphere_norm2 - self.quadric_norm2)
        return gap / abs(self.sphere_norm2) if self.sphere_norm2 else gap

    @property
    def limit_gap_abs(self) -> float:
        return max(
            abs(self.sphere_norm2 - self.gamma_norm2),
            abs(self.quadric_norm2 - self.gamma_norm2),
        )


def diagram_check(p: RealPoly, T, n: int) -> DiagramReport:
    """Norm chain at one dimension: sphere norm, quadric norm, limit norm.

    The first two agree at every n; both converge to the third.
    """
    if p.width() >= n:
        raise diffops.DimensionError(
            f"diagram check needs ambient dimension > {p.width()}, got {n}"
        )
    sphere_norm = float(measures.sphere_moment(p * p, n))
    flowed = transforms.sphere_sbt(p, n, T)
    quadric_norm = complex(measures.quadric_moment(flowed.mod_square(), n, T)).real
    limit_out = transforms.limit_sbt(p, T)
    gamma_norm = complex(measures.gamma_moment(limit_out.mod_square(), T)).real
    return DiagramReport(n, float(T), sphere_norm, quadric_norm, gamma_norm)


def diagram_convergence(p: RealPoly, T, ns=DEFAULT_N_GRID,
                        finite_tol: float = 1e-9) -> ConvergenceTable:
    """Sweep diagram_check over a grid; errors are distances to the limit norm."""
    reports = ordered_map(lambda n: diagram_check(p, T, n), ns)
    for r in reports:
        if r.finite_gap_rel > finite_tol:
            raise AssertionError(
                f"finite-dimension isometry broke at n={r.n}: gap {r.finite_gap_rel:.3e}"
            )
    errors = [r.limit_gap_abs for r in reports]
    return ConvergenceTable(
        quantity="diagram-norm-chain",
        ns=tuple(ns),
        values=[r.sphere_norm2 for r in reports],
        references=[r.gamma_norm2 for r in reports],
        errors=errors,
        fitted_rate=_rate_or_nan(ns, errors),
        reference_label="limit-range norm",
        meta={"T": T},
    )
