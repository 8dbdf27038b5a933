"""Command-line surface: validation, scans, eigenvalue tables, Weyl sampling,
inverse fitting, and a built-in self-check suite.

Exit codes: 0 success, 1 validation/schema problems, 2 numerical failures,
3 I/O failures. All numeric CSV output uses 17 significant digits so
re-reading a file reproduces the values exactly.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

from . import inverse, problems, spectral, weyl
from .errors import (
    EmptyGridError,
    NoConvergenceError,
    NumericalError,
    SchemaError,
    ValidationError,
)
from .model import PI, _require_keys, problem_from_dict, validate
from .oracle import jump_matrix, oracle_delta, region_matrix
from .util import fmt, read_csv, write_csv

WEYL_CSV_HEADER = ["re_lambda", "im_lambda", "re_m", "im_m", "pole_distance"]


def parse_grid(spec: str):
    """Parse "re0:re1:n[,im]" into a list of complex grid points."""
    im = 0.0
    main = spec
    if "," in spec:
        main, imtxt = spec.split(",", 1)
        im = float(imtxt)
    parts = main.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid spec must be re0:re1:n[,im], got {spec!r}")
    re0, re1, n = float(parts[0]), float(parts[1]), int(parts[2])
    if n < 2:
        raise ValueError("grid needs at least 2 points")
    step = (re1 - re0) / (n - 1)
    return [complex(re0 + k * step, im) for k in range(n)]


def parse_problem_file(path: str, allow_identity=False):
    """Strict JSON problem parse followed by model validation."""
    with open(path) as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: {exc}") from exc
    prob = problem_from_dict(raw)
    violations = validate(prob, allow_identity=allow_identity)
    if violations:
        raise ValidationError(violations)
    return prob


def parse_family_file(path: str):
    with open(path) as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: {exc}") from exc
    _require_keys(raw, ("names", "bounds", "base_problem"), path)
    try:
        fam = inverse.ParameterFamily(
            names=tuple(str(n) for n in raw["names"]),
            bounds=tuple((float(b[0]), float(b[1])) for b in raw["bounds"]),
            base_problem=problem_from_dict(raw["base_problem"]))
    except (TypeError, IndexError, ValueError) as exc:
        raise SchemaError(f"{path}: {exc}") from exc
    violations = inverse.validate_family(fam)
    if violations:
        raise ValidationError(violations)
    return fam


def cmd_validate(args) -> int:
    prob = parse_problem_file(args.problem,
                              allow_identity=args.allow_identity)
    print(f"valid: optical length D={fmt(prob.density.optical_length)}")
    return 0


def cmd_det_scan(args) -> int:
    prob = parse_problem_file(args.problem, allow_identity=True)
    grid = parse_grid(args.grid)
    samples = spectral.scan_characteristic(prob, grid)
    write_csv(args.out,
              ["re_lambda", "re_delta", "im_delta", "re_delta0", "im_delta0"],
              [(s.lam.real, s.delta.real, s.delta.imag,
                s.delta0.real, s.delta0.imag) for s in samples])
    return 0


def cmd_eig(args) -> int:
    prob = parse_problem_file(args.problem, allow_identity=True)
    records = spectral.find_eigenvalues(prob, args.lambda_max,
                                        refine_tol=args.tol)
    # beta_n / alpha_n can pick up imaginary parts when gamma != 0; the CSV
    # reports real parts, the library call carries the full values
    rows = [(r.n, r.lambda_n, r.beta_n.real, r.alpha_n.real, r.lambda_n0,
             r.residual, spectral.check_lemma4(r)["relative_error"])
            for r in records]
    write_csv(args.out,
              ["n", "lambda_n", "beta_n", "alpha_n", "lambda_n0",
               "residual", "lemma4_relerr"], rows)
    return 0


def cmd_asymptotics(args) -> int:
    prob = parse_problem_file(args.problem, allow_identity=True)
    big_d = prob.density.optical_length
    n_rows = max(5, int(math.floor(args.lambda_max * big_d / PI)) - 2)
    rows = spectral.asymptotic_table(prob, n_rows)
    write_csv(args.out,
              ["n", "lambda_n", "lambda_n0", "gap", "product",
               "model_root", "model_gap", "model_product"],
              [(r.n, r.lambda_n, r.lambda_n0, r.gap, r.product,
                r.model_root, r.model_gap, r.model_product) for r in rows])
    return 0


def cmd_weyl_sample(args) -> int:
    prob = parse_problem_file(args.problem, allow_identity=True)
    grid = parse_grid(args.grid)
    if all(abs(g.imag) < 1e-12 for g in grid):
        # real-axis grid: locate the poles first so exclusion can work
        ceiling = max(g.real for g in grid) + 1.0
        eigs = spectral.find_eigenvalues(prob, ceiling, refine_tol=args.tol,
                                         compute_extras=False)
    else:
        eigs = []
    samples = weyl.sample_weyl_grid(prob, grid, eigs)
    write_csv(args.out, WEYL_CSV_HEADER,
              [(s.lam.real, s.lam.imag, s.m.real, s.m.imag, s.pole_distance)
               for s in samples])
    return 0


def _read_target_samples(path):
    header, rows = read_csv(path)
    if header != WEYL_CSV_HEADER:
        raise SchemaError(
            f"{path}: expected weyl-sample columns {WEYL_CSV_HEADER}, "
            f"got {header}")
    out = []
    for row in rows:
        re_l, im_l, re_m, im_m = (float(v) for v in row[:4])
        out.append((complex(re_l, im_l), complex(re_m, im_m)))
    return out


def cmd_invert(args) -> int:
    fam = parse_family_file(args.family)
    samples = _read_target_samples(args.target)

    def dump(result) -> None:
        payload = {"params": result.params, "objective": result.objective,
                   "iterations": result.iterations,
                   "converged": result.converged}
        with open(args.out, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")

    try:
        result = inverse.fit(fam, samples, seed=args.seed)
    except NoConvergenceError as exc:
        dump(exc.best)
        print(f"numerical error: {exc}", file=sys.stderr)
        return 2
    dump(result)
    return 0


def _selfcheck_rows():
    triv = problems.trivial()
    gamma = problems.jump_gamma()

    def trivial_delta():
        worst = max(abs(spectral.delta(triv, lam) - (-math.cos(lam * PI)))
                    for lam in (0.7, 1.0, 1.3))
        return worst <= 1e-8, f"max defect {worst:.2e}"

    def trivial_eigen():
        recs = spectral.find_eigenvalues(triv, 5.0, compute_extras=False)
        worst = max(abs(r.lambda_n - (r.n + 0.5)) for r in recs)
        return len(recs) == 5 and worst <= 1e-8, \
            f"{len(recs)} roots, max offset {worst:.2e}"

    def trivial_weyl():
        defect = abs(weyl.weyl_function(triv, 0.25) - (-4.0))
        return defect <= 1e-8, f"defect {defect:.2e}"

    def oracle_dets():
        worst = 0.0
        for lam in (0.7, 2.5 + 0.4j):
            for mat in (region_matrix(4.0, 0.5, lam, 1.0),
                        jump_matrix(1.5, 0.2, lam),
                        jump_matrix(0.8, -0.1, lam)):
                det = mat[0, 0] * mat[1, 1] - mat[0, 1] * mat[1, 0]
                worst = max(worst, abs(det - 1.0))
        return worst <= 1e-12, f"max |det-1| {worst:.2e}"

    def oracle_match():
        worst = 0.0
        for k in range(10):
            lam = 0.5 + 0.8 * k
            ds = spectral.delta(gamma, lam)
            do = oracle_delta(gamma.density, gamma.jumps, lam)
            worst = max(worst, abs(ds - do) / max(1.0, abs(do)))
        return worst <= 1e-8, f"max rel defect {worst:.2e}"

    def wronskian_const():
        vals = [spectral.delta(gamma, 2.2, x_star=xs)
                for xs in (0.5, 1.5, 2.6)]
        spread = max(abs(v - vals[0]) for v in vals) / max(1.0, abs(vals[0]))
        return spread <= 1e-8, f"relative spread {spread:.2e}"

    def derivative_identity():
        rec = spectral.find_eigenvalues(triv, 1.0)[0]
        rel = spectral.check_lemma4(rec)["relative_error"]
        return rel <= 1e-6, f"relative error {rel:.2e}"

    return [
        ("trivial profile: closed-form determinant", trivial_delta),
        ("trivial profile: eigenvalues n + 1/2", trivial_eigen),
        ("trivial profile: Weyl value M(0.25) = -4", trivial_weyl),
        ("oracle: unit determinant of transfer blocks", oracle_dets),
        ("jump fixture: shooting matches oracle", oracle_match),
        ("jump fixture: Wronskian constant in x*", wronskian_const),
        ("trivial profile: derivative identity at root 0", derivative_identity),
    ]


def cmd_selfcheck(args) -> int:
    failures = 0
    for name, check in _selfcheck_rows():
        try:
            ok, detail = check()
        except Exception as exc:  # a crash is a failing row, not a crash
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        status = "PASS" if ok else "FAIL"
        print(f"{name:<48} {status}  ({detail})")
        failures += 0 if ok else 1
    if failures:
        print(f"{failures} self-check(s) failed", file=sys.stderr)
        return 2
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qpencil",
        description="Forward and inverse spectral solver for a quadratic "
                    "operator pencil with interior jump conditions.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        return p

    p = add("validate", cmd_validate, "check a problem file")
    p.add_argument("--problem", required=True)
    p.add_argument("--allow-identity", action="store_true",
                   help="accept identity jumps / unit density (test profiles)")

    p = add("det-scan", cmd_det_scan,
            "tabulate the determinant and its zeroth-order model over a grid")
    p.add_argument("--problem", required=True)
    p.add_argument("--grid", required=True, help="re0:re1:n[,im]")
    p.add_argument("--out", required=True)

    p = add("eig", cmd_eig, "enumerate eigenvalues with normalization data")
    p.add_argument("--problem", required=True)
    p.add_argument("--lambda-max", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--out", required=True)

    p = add("asymptotics", cmd_asymptotics,
            "eigenvalues against their asymptotic main terms")
    p.add_argument("--problem", required=True)
    p.add_argument("--lambda-max", type=float, required=True)
    p.add_argument("--out", required=True)

    p = add("weyl-sample", cmd_weyl_sample,
            "sample the Weyl function over a pole-aware grid")
    p.add_argument("--problem", required=True)
    p.add_argument("--grid", required=True, help="re0:re1:n[,im]")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--out", required=True)

    p = add("invert", cmd_invert,
            "fit family parameters to Weyl samples")
    p.add_argument("--family", required=True, help="family JSON file")
    p.add_argument("--target", required=True, help="weyl-sample CSV")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="result JSON file")

    add("selfcheck", cmd_selfcheck, "run the built-in verification table")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SchemaError, ValidationError, EmptyGridError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
