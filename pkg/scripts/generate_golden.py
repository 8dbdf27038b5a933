#!/usr/bin/env python3
"""Generate the frozen oracle golden file used by the regression tests.

Run once and commit the output; the shooting solver is never used to
produce its own expectations. Rows are (fixture-id, re lambda, im lambda,
re delta, im delta) with 17-digit floats.

Usage: python3 scripts/generate_golden.py [out.csv]
"""
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from qpencil import problems  # noqa: E402
from qpencil.oracle import oracle_delta, region_q_values  # noqa: E402
from qpencil.util import write_csv  # noqa: E402

LAMBDAS = [0.7, 2.5, 5.0, 11.0, 2.5 + 0.4j, 0.3 + 1.1j]

FIXTURES = ["jump-plain", "jump-gamma", "jump-gamma-q", "jump-q1"]


def main():
    out = sys.argv[1] if len(sys.argv) > 1 else str(
        pathlib.Path(__file__).resolve().parents[1]
        / "tests" / "data" / "golden_deltas.csv")
    rows = []
    for name in FIXTURES:
        prob = problems.get(name)
        qv = region_q_values(prob)
        for lam in LAMBDAS:
            d = oracle_delta(prob.density, prob.jumps, lam, qv)
            rows.append((name, complex(lam).real, complex(lam).imag,
                         d.real, d.imag))
    write_csv(out, ["fixture", "re_lambda", "im_lambda",
                    "re_delta", "im_delta"], rows)
    print(f"wrote {len(rows)} rows to {out}")


if __name__ == "__main__":
    main()
