"""Command-line driver: isometry tables, convergence sweeps, invariant checks.

Output is machine readable: CSV with fixed columns
(N, T, quantity, value, reference, abs_error, rel_error) or JSON mirroring
the same rows as objects.  Exit codes: 0 success, 1 tolerance/assertion
failure, 2 usage or precondition error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from fractions import Fraction

from . import diffops, limits, measures, oracle, semigroup, suite, transforms
from .diffops import DimensionError
from .polyalg import CxPoly, RealPoly, coeff_distance, holomorphic_extend
from .semigroup import DimensionCapError

CSV_COLUMNS = ("N", "T", "quantity", "value", "reference", "abs_error", "rel_error")

PRESETS = {
    "one": "1",
    "x1": "x1",
    "x1sq": "x1^2",
    "mixed": "x1*x2 + x1^2*x3 - 1/2",
}

CX_PRESETS = ("a1abar1", "a1sq")


class PolyParseError(ValueError):
    """Parse failure carrying a 1-based column offset."""

    def __init__(self, message: str, column: int):
        super().__init__(f"column {column}: {message}")
        self.column = column


# ---------------------------------------------------------------------------
# polynomial parsing: c*x1^a*x2^b +/- ...

_NUMBER = re.compile(r"(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?")
_VAR = re.compile(r"x(\d+)")
_EXP = re.compile(r"\d+")


def parse_poly(text: str) -> RealPoly:
    """Parse an inline polynomial; raises PolyParseError citing the column."""
    pos = 0
    n = len(text)

    def err(message, at):
        raise PolyParseError(message, at + 1)

    def skip_ws():
        nonlocal pos
        while pos < n and text[pos].isspace():
            pos += 1

    def parse_factor():
        nonlocal pos
        skip_ws()
        if pos >= n:
            err("expected a coefficient or variable", pos)
        if text[pos] == "x":
            m = _VAR.match(text, pos)
            if not m:
                err("expected a variable index after 'x'", pos)
            index = int(m.group(1))
            if index < 1:
                err("variable indices start at 1", pos)
            pos = m.end()
            power = 1
            if pos < n and text[pos] == "^":
                pos += 1
                m2 = _EXP.match(text, pos)
                if not m2:
                    err("expected an integer exponent after '^'", pos)
                power = int(m2.group(0))
                pos = m2.end()
            return "var", index - 1, power
        m = _NUMBER.match(text, pos)
        if not m:
            err(f"unexpected character {text[pos]!r}", pos)
        literal = m.group(0)
        pos = m.end()
        if "." in literal or "e" in literal or "E" in literal:
            return "num", float(literal), True
        if pos < n and text[pos] == "/":
            slash = pos
            pos += 1
            m2 = _EXP.match(text, pos)
            if not m2:
                err("expected a denominator after '/'", pos)
            den = int(m2.group(0))
            if den == 0:
                err("zero denominator", slash)
            pos = m2.end()
            return "num", Fraction(int(literal), den), False
        return "num", Fraction(int(literal)), False

    terms = []
    saw_float = False
    first = True
    skip_ws()
    if pos >= n:
        err("empty polynomial", pos)
    while pos < n:
        skip_ws()
        if pos >= n:
            break
        sign = 1
        if text[pos] in "+-":
            sign = -1 if text[pos] == "-" else 1
            pos += 1
        elif not first:
            err(f"expected '+' or '-', found {text[pos]!r}", pos)
        first = False
        coeff = Fraction(sign)
        exps: dict = {}
        while True:
            kind, *payload = parse_factor()
            if kind == "var":
                index, power = payload
                exps[index] = exps.get(index, 0) + power
            else:
                value, is_float = payload
                saw_float = saw_float or is_float
                coeff = coeff * value
            skip_ws()
            if pos < n and text[pos] == "*":
                pos += 1
                continue
            break
        width = max(exps) + 1 if exps else 0
        key = tuple(exps.get(j, 0) for j in range(width))
        terms.append((key, coeff))
    mode_float = saw_float
    acc: dict = {}
    for key, coeff in terms:
        acc[key] = acc.get(key, Fraction(0) if not mode_float else 0.0) + (
            float(coeff) if mode_float else coeff
        )
    return RealPoly(acc, "float" if mode_float else "exact")


def resolve_polys(spec: str, k: int = 3, deg: int = 6, seed: int | None = None):
    """Map a --poly argument to labelled polynomials."""
    if spec == "suite":
        return suite.acceptance_suite(
            k=k, degree=deg, seed=suite.SUITE_SEED if seed is None else seed
        )
    if spec in PRESETS:
        return [(spec, parse_poly(PRESETS[spec]))]
    return [(spec, parse_poly(spec))]


def resolve_cx_poly(spec: str) -> tuple:
    if spec == "a1abar1":
        return spec, CxPoly.a(0) * CxPoly.abar(0)
    if spec == "a1sq":
        return spec, CxPoly.a(0) * CxPoly.a(0)
    if spec.startswith("modsq:"):
        p = parse_poly(spec[len("modsq:"):])
        return spec, holomorphic_extend(p).mod_square()
    raise PolyParseError(
        f"complex integrands are {', '.join(CX_PRESETS)} or modsq:<poly>", 1
    )


# ---------------------------------------------------------------------------
# grids and output


def parse_n_grid(text: str) -> tuple:
    text = text.strip()
    if ".." in text:
        lo_str, hi_str = text.split("..", 1)
        lo, hi = int(lo_str), int(hi_str)
        if lo < 2 or hi < lo:
            raise ValueError(f"bad N range {text!r}")
        grid = {n for n in limits.DEFAULT_N_GRID if lo <= n <= hi}
        grid.update((lo, hi))
        return tuple(sorted(grid))
    values = tuple(sorted({int(x) for x in text.split(",") if x.strip()}))
    if not values:
        raise ValueError("empty N grid")
    return values


def parse_t_list(text: str) -> tuple:
    values = tuple(float(x) for x in text.split(",") if x.strip())
    if not values or any(t <= 0 for t in values):
        raise ValueError(f"bad T list {text!r}")
    return values


def _fmt(value):
    if isinstance(value, complex):
        if abs(value.imag) < 1e-12 * max(1.0, abs(value.real)):
            return value.real
        return f"{value.real}{value.imag:+}j"
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    if isinstance(value, float) and math.isnan(value):
        return "nan"
    return value


def write_rows(rows, fmt: str, out_path, footer: dict | None = None) -> None:
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow([_fmt(row.get(col, "")) for col in CSV_COLUMNS])
        for key, value in (footer or {}).items():
            writer.writerow(["", "", key, _fmt(value), "", "", ""])
        text = buf.getvalue()
    else:
        obj = {"rows": [{k: _fmt(v) for k, v in row.items()} for row in rows]}
        if footer:
            obj.update({k: _fmt(v) for k, v in footer.items()})
        text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if out_path:
        with open(out_path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# isometry command


def cmd_isometry(args) -> int:
    polys = resolve_polys(args.poly, k=args.k, deg=args.deg, seed=args.seed)
    t_list = parse_t_list(args.T)
    rows = []
    worst = 0.0
    for label, p in polys:
        for t in t_list:
            if args.transform == "sphere":
                tags = [
                    (n, transforms.Sphere(n, t)) for n in parse_n_grid(args.N)
                ]
            elif args.transform == "limit":
                tags = [("", transforms.Limit(t))]
            else:
                tags = [("", transforms.Euclidean(args.s, t))]
            for n, tag in tags:
                if isinstance(tag, transforms.Sphere) and p.width() >= tag.n:
                    raise DimensionError(
                        f"{label}: needs ambient dimension > {p.width()}, got {tag.n}"
                    )
                report = transforms.unitarity_report(p, tag)
                worst = max(worst, report.rel_error)
                rows.append(
                    {
                        "N": n,
                        "T": t,
                        "quantity": f"{args.transform}-isometry [{label}]",
                        "value": report.range_norm2,
                        "reference": report.domain_norm2,
                        "abs_error": abs(report.range_norm2 - report.domain_norm2),
                        "rel_error": report.rel_error,
                    }
                )
    write_rows(rows, args.format, args.out)
    return 0 if worst <= args.tol else 1


# ---------------------------------------------------------------------------
# convergence command


def cmd_converge(args) -> int:
    ns = parse_n_grid(args.N)
    t = parse_t_list(args.T)[0]
    if args.quantity == "laplacian":
        label, p = resolve_polys(args.poly)[0]
        table = limits.laplacian_limit(p, ns)
    elif args.quantity == "sphere-moment":
        label, p = resolve_polys(args.poly)[0]
        table = limits.measure_limit(p, "sphere", ns=ns)
    elif args.quantity == "quadric-moment":
        label, q = resolve_cx_poly(args.poly if args.poly != "suite" else "a1abar1")
        table = limits.measure_limit(q, "quadric", T=t, ns=ns)
    elif args.quantity == "transform":
        label, p = resolve_polys(args.poly)[0]
        table = limits.transform_limit(p, t, ns)
    elif args.quantity == "diagram":
        label, p = resolve_polys(args.poly)[0]
        table = limits.diagram_convergence(p, t, ns)
    else:
        raise ValueError(f"unknown quantity {args.quantity!r}")
    rows = table.csv_rows()
    for row in rows:
        row["quantity"] = f"{row['quantity']} [{label}]"
    write_rows(rows, args.format, args.out, footer={"fitted_rate": table.fitted_rate})
    return 0


# ---------------------------------------------------------------------------
# verify command


def _verify_checks(k: int, deg: int, seed: int, tol_override):
    """Yield (name, passed, detail) for every module invariant."""
    import random

    from . import polyalg

    rng = random.Random(seed)
    polys = [suite.random_real_poly(rng, k=k, degree=deg) for _ in range(6)]

    def tol(default):
        return default if tol_override is None else tol_override

    # -- polynomial ring laws
    a, b, c = polys[0], polys[1], polys[2]
    ok = (a * (b + c)) == (a * b + a * c) and (a * b) * c == a * (b * c)
    yield "ring-axioms", ok, "distributivity and associativity on random inputs"

    ext = holomorphic_extend
    ok = ext(a * b) == ext(a) * ext(b)
    yield "extend-homomorphism", ok, "holomorphic extension respects products"

    qa = ext(a) * CxPoly.abar(0) + CxPoly.a(1).scale(polyalg.GaussianRational(0, 1))
    ok = qa.conjugate().conjugate() == qa
    yield "conjugate-involution", ok, "double conjugation is the identity"

    ok = a.dilate(Fraction(2)).dilate(Fraction(3, 2)) == a.dilate(Fraction(3))
    yield "dilate-composition", ok, "dilations compose multiplicatively"

    # -- operators and matrices
    n_dim = max(k + 2, 5)
    ops = [
        diffops.LAPLACIAN,
        diffops.EULER,
        diffops.HERMITE,
        diffops.spherical_laplacian_op(n_dim),
    ]
    ok = True
    detail = ""
    space = semigroup.graded_space(k, deg, "real")
    for op in ops:
        mat = diffops.to_matrix(op, k, deg)
        for p in polys[:3]:
            direct = op.apply(p)
            via = mat.apply(p)
            if coeff_distance(direct, via) != 0:
                ok = False
                detail = f"{op.kind} disagrees with its matrix"
    yield "matrix-vs-symbolic", ok, detail or "matrices reproduce symbolic action"

    eul = diffops.to_matrix(diffops.EULER, k, deg)
    lap = diffops.to_matrix(diffops.LAPLACIAN, k, deg)
    comm = diffops.commutator(eul, lap)
    ok = not any(
        comm.entries[i, j] != -2 * lap.entries[i, j]
        for i in range(space.dim)
        for j in range(space.dim)
    )
    yield "euler-laplacian-commutator", ok, "[Euler, Lap] = -2 Lap exactly"

    t_bch = 1.0
    rep = semigroup.bch_check(
        (-t_bch / 2.0) * eul.to_float(), (t_bch / 2.0) * lap.to_float(), t_bch
    )
    ok = rep.ok(tol(1e-11))
    yield "bch-dilation-heat", ok, f"max deviation {rep.max_deviation:.2e}"

    g_mat = semigroup.base_matrix(diffops.g_uv_op(1), 2, min(deg, 6))
    lap_u = semigroup.base_matrix(diffops.laplacian_op(indices=(0,)), 2, min(deg, 6))
    rep = semigroup.bch_check(t_bch * g_mat, 0.5 * lap_u, -t_bch)
    ok = rep.ok(tol(1e-11))
    yield "bch-limit-measure", ok, f"max deviation {rep.max_deviation:.2e}"

    fac = semigroup.factor_quadric_limit(1, min(deg, 6), 1.0)
    ok = fac.max_deviation <= tol(1e-11)
    yield "quadric-factorization", ok, f"max deviation {fac.max_deviation:.2e}"

    # -- semigroups
    p = polys[3]
    t1, t2 = 0.3, 0.9
    lhs = semigroup.exp_graded(diffops.HERMITE, t1 + t2, p)
    rhs = semigroup.exp_graded(diffops.HERMITE, t1, semigroup.exp_graded(diffops.HERMITE, t2, p))
    ok = coeff_distance(lhs, rhs) <= tol(1e-12)
    yield "semigroup-law", ok, f"distance {float(coeff_distance(lhs, rhs)):.2e}"

    lam = -0.4
    lhs = semigroup.dilation_exp(lam, p.to_float())
    rhs = semigroup.exp_graded(diffops.EULER, lam, p)
    ok = coeff_distance(lhs, rhs) <= tol(1e-13)
    yield "dilation-vs-euler-exp", ok, f"distance {float(coeff_distance(lhs, rhs)):.2e}"

    big_t = 0.7
    route_a = transforms.limit_sbt(p, big_t)
    route_b = transforms.euclidean_sbt(p, 1.0, 1.0 - math.exp(-big_t)).dilate(
        math.exp(-big_t / 2.0)
    )
    ok = coeff_distance(route_a, route_b) <= tol(1e-12)
    yield "two-route-limit-transform", ok, (
        f"distance {float(coeff_distance(route_a, route_b)):.2e}"
    )

    # -- unitarity
    worst = 0.0
    for p in polys[:4]:
        for tag in (
            transforms.Sphere(max(n_dim, 7), 0.8),
            transforms.Limit(0.8),
            transforms.Euclidean(1.0, 0.6),
        ):
            worst = max(worst, transforms.unitarity_report(p, tag).rel_error)
    ok = worst <= tol(1e-9)
    yield "unitarity", ok, f"worst relative norm gap {worst:.2e}"

    # -- oracles
    ok = True
    for p in polys[:3]:
        if measures.gaussian_moment(p * p, Fraction(1)) != oracle.isserlis_moment(
            p * p, Fraction(1)
        ):
            ok = False
    yield "isserlis-vs-heat", ok, "pairing sums equal heat-operator moments exactly"

    q = holomorphic_extend(
        RealPoly({(2,): 1, (0, 1): 1, (): Fraction(1, 2)})
    )
    sq = q.mod_square()
    order = sq.degree() // 2 + 1
    quad = oracle.quad_gauss_moment(sq, measures.MeasureSpec.gamma(1.0), order)
    direct = measures.gamma_moment(sq, 1.0)
    gap = abs(complex(quad.value) - complex(direct)) / max(1.0, abs(complex(direct)))
    ok = gap <= tol(1e-12)
    yield "quadrature-vs-gamma", ok, f"relative gap {gap:.2e}"

    est = oracle.mc_sphere_moment(suite.MONOMIALS[6][1], 50, samples=200_000, seed=seed)
    ref = float(measures.sphere_moment(suite.MONOMIALS[6][1], 50))
    ok = abs(est.value - ref) <= 4 * est.std_error
    yield "mc-vs-sphere", ok, (
        f"|{est.value:.5f} - {ref:.5f}| vs 4*se={4 * est.std_error:.5f}"
    )

    big_t = 0.9
    q = holomorphic_extend(polys[5]).to_float()
    lhs = measures.gamma_moment(q * q.conjugate(), big_t)
    rhs = measures.xi_moment(
        (q * q.conjugate()).dilate(math.exp(big_t / 2.0)), 1.0, 1.0 - math.exp(-big_t)
    )
    gap = abs(complex(lhs) - complex(rhs)) / max(1.0, abs(complex(lhs)))
    ok = gap <= tol(1e-12)
    yield "gamma-as-dilated-xi", ok, f"relative gap {gap:.2e}"

    small_q = CxPoly.a(0) * CxPoly.abar(0) + CxPoly.a(0) * CxPoly.a(0)
    direct = measures.quadric_moment(small_q, 7, 0.8)
    ref = measures.quadric_moment_direct(small_q, 7, 0.8)
    gap = abs(direct - ref)
    ok = gap <= tol(1e-10)
    yield "quadric-kernel-vs-direct", ok, f"gap {gap:.2e}"


def cmd_verify(args) -> int:
    failures = 0
    for name, ok, detail in _verify_checks(args.k, args.deg, args.seed, args.tol):
        status = "PASS" if ok else "FAIL"
        print(f"{status} {name}: {detail}")
        failures += 0 if ok else 1
    print(f"{'OK' if not failures else 'FAILED'}: {failures} failing invariant(s)")
    return 0 if failures == 0 else 1


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sbtlab",
        description="verification tables for sphere transforms and their limits",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    iso = sub.add_parser("isometry", help="domain vs range norms of a transform")
    iso.add_argument("--poly", default="suite",
                     help="inline polynomial, preset name, or 'suite'")
    iso.add_argument("--transform", choices=("sphere", "limit", "euclidean"),
                     default="sphere")
    iso.add_argument("--N", default="5,10,25,50", help="comma list or lo..hi")
    iso.add_argument("--T", default="1.0", help="comma list of times")
    iso.add_argument("--s", type=float, default=1.0,
                     help="domain variance for the euclidean transform")
    iso.add_argument("--k", type=int, default=3,
                     help="variable count of the random suite polynomials")
    iso.add_argument("--deg", "--max-degree", dest="deg", type=int, default=6,
                     help="max degree of the random suite polynomials")
    iso.add_argument("--seed", type=int, default=None,
                     help="seed for the random part of the suite")
    iso.add_argument("--tol", type=float, default=1e-9)
    iso.add_argument("--format", choices=("csv", "json"), default="csv")
    iso.add_argument("--out", default=None)
    iso.set_defaults(fn=cmd_isometry)

    conv = sub.add_parser("converge", help="large-dimension convergence sweep")
    conv.add_argument("--quantity", required=True, choices=(
        "laplacian", "sphere-moment", "quadric-moment", "transform", "diagram"))
    conv.add_argument("--poly", default="x1",
                      help="inline polynomial or preset; quadric-moment takes "
                           "a1abar1, a1sq, or modsq:<poly>")
    conv.add_argument("--N", default="10..10000", help="comma list or lo..hi")
    conv.add_argument("--T", default="1.0")
    conv.add_argument("--format", choices=("csv", "json"), default="csv")
    conv.add_argument("--out", default=None)
    conv.set_defaults(fn=cmd_converge)

    ver = sub.add_parser("verify", help="run the module invariants")
    ver.add_argument("--k", type=int, default=2, help="variable count")
    ver.add_argument("--deg", "--max-degree", dest="deg", type=int, default=6)
    ver.add_argument("--seed", type=int, default=7)
    ver.add_argument("--tol", type=float, default=None,
                     help="override every check tolerance (tighten to force failures)")
    ver.set_defaults(fn=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except AssertionError as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return 1
    except (PolyParseError, DimensionError, DimensionCapError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
