"""Problem data model: coefficients, density profile, jump parameters.

The operator under study is

    -y'' + [2 lambda p(x) + q(x)] y = lambda^2 delta(x) y,   x in (0, pi),

with boundary conditions y'(0) = 0, y(pi) = 0, a piecewise-constant density

    delta(x) = 1 on (0, p1),  alpha^2 on (p1, p2),  beta^2 on (p2, pi),

and interior transmission (jump) conditions at p1 and p2,

    y(p_i + 0)  = alpha_i y(p_i - 0),
    y'(p_i + 0) = (1/alpha_i) y'(p_i - 0) + i lambda gamma_i y(p_i - 0).

Everything here is immutable and safe to share across threads.
"""
from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import quadrature
from .errors import SchemaError

PI = math.pi

COEFF_KINDS = ("piecewise-constant", "piecewise-polynomial", "grid-sampled")


def _as_float_tuple(seq):
    out = tuple(float(v) for v in seq)
    if any(not math.isfinite(v) for v in out):
        raise ValueError("non-finite value in coefficient data")
    return out


@dataclass(frozen=True)
class CoefficientFunction:
    """A real coefficient on [0, pi] in one of three representations.

    kind
        "piecewise-constant": `values` holds one constant per piece; the
        pieces are split by `breakpoints` (k breakpoints give k+1 pieces).
        "piecewise-polynomial": `values` holds, per piece, ascending
        polynomial coefficients in the local coordinate (x - piece_start).
        "grid-sampled": `values` holds samples on a uniform mesh over
        [0, pi] (endpoints included) with linear interpolation between
        samples; `breakpoints` must be empty.

    Evaluation is right-continuous at breakpoints; the rightmost piece also
    covers x = pi.
    """

    kind: str
    breakpoints: tuple
    values: tuple

    def __post_init__(self):
        if self.kind not in COEFF_KINDS:
            raise ValueError(f"unknown coefficient kind {self.kind!r}")
        object.__setattr__(
            self, "breakpoints", _as_float_tuple(self.breakpoints)
        )
        if self.kind == "piecewise-polynomial":
            vals = tuple(_as_float_tuple(piece) for piece in self.values)
            if any(len(piece) == 0 for piece in vals):
                raise ValueError("empty coefficient list for a piece")
        else:
            vals = _as_float_tuple(self.values)
        object.__setattr__(self, "values", vals)
        if self.kind == "grid-sampled":
            if self.breakpoints:
                raise ValueError("grid-sampled coefficients take no breakpoints")
            if len(vals) < 2:
                raise ValueError("grid-sampled coefficients need >= 2 samples")
        else:
            if len(vals) != len(self.breakpoints) + 1:
                raise ValueError(
                    f"{len(self.breakpoints)} breakpoints require "
                    f"{len(self.breakpoints) + 1} pieces, got {len(vals)}"
                )

    @classmethod
    def constant(cls, c: float) -> "CoefficientFunction":
        return cls("piecewise-constant", (), (float(c),))

    @classmethod
    def zero(cls) -> "CoefficientFunction":
        return cls.constant(0.0)

    @property
    def is_zero(self) -> bool:
        if self.kind == "piecewise-polynomial":
            return all(all(c == 0.0 for c in piece) for piece in self.values)
        return all(v == 0.0 for v in self.values)

    def piece_arrays(self):
        """Lower to piecewise-polynomial arrays covering [0, pi].

        Returns (breaks, coefs): breaks has n+1 edges starting at 0.0 and
        ending at pi; coefs[i] holds ascending polynomial coefficients of
        piece i in the local coordinate (x - breaks[i]), zero padded to a
        common width.
        """
        if self.kind == "grid-sampled":
            n = len(self.values) - 1
            breaks = np.linspace(0.0, PI, n + 1)
            coefs = np.empty((n, 2))
            h = PI / n
            v = np.asarray(self.values)
            coefs[:, 0] = v[:-1]
            coefs[:, 1] = (v[1:] - v[:-1]) / h
            return breaks, coefs
        breaks = np.concatenate(([0.0], np.asarray(self.breakpoints), [PI]))
        if self.kind == "piecewise-constant":
            coefs = np.asarray(self.values, dtype=float).reshape(-1, 1)
            return breaks, coefs
        width = max(len(piece) for piece in self.values)
        coefs = np.zeros((len(self.values), width))
        for i, piece in enumerate(self.values):
            coefs[i, : len(piece)] = piece
        return breaks, coefs

    def evaluate(self, x: float) -> float:
        """Evaluate at x in [0, pi] (right-continuous at breakpoints)."""
        breaks, coefs = self.piece_arrays()
        i = bisect_right(breaks.tolist(), x) - 1
        i = min(max(i, 0), len(coefs) - 1)
        t = x - breaks[i]
        acc = 0.0
        for c in coefs[i][::-1]:
            acc = acc * t + c
        return float(acc)

    def integrate(self, a: float, b: float) -> float:
        """Exact integral over [a, b] (piecewise antiderivative)."""
        if b < a:
            return -self.integrate(b, a)
        breaks, coefs = self.piece_arrays()
        total = 0.0
        for i in range(len(coefs)):
            lo, hi = max(a, breaks[i]), min(b, breaks[i + 1])
            if hi <= lo:
                continue
            # antiderivative of sum c_j t^j is sum c_j t^(j+1)/(j+1)
            for j, c in enumerate(coefs[i]):
                t1 = (hi - breaks[i]) ** (j + 1)
                t0 = (lo - breaks[i]) ** (j + 1)
                total += c * (t1 - t0) / (j + 1)
        return total


@dataclass(frozen=True)
class DensityProfile:
    """Three-step density delta(x): 1, alpha^2, beta^2 split at p1 < p2."""

    alpha: float
    beta: float
    p1: float
    p2: float

    @property
    def optical_length(self) -> float:
        """Integral of sqrt(delta), the mean-eigenvalue-spacing scale."""
        return self.p1 + self.alpha * (self.p2 - self.p1) + self.beta * (PI - self.p2)

    def regions(self):
        """Tuples (x_left, x_right, eta) with eta the density value there."""
        return (
            (0.0, self.p1, 1.0),
            (self.p1, self.p2, self.alpha ** 2),
            (self.p2, PI, self.beta ** 2),
        )

    def region_index(self, x: float) -> int:
        if x == self.p1 or x == self.p2:
            raise ValueError("density undefined at jump point")
        if x < self.p1:
            return 0
        if x < self.p2:
            return 1
        return 2

    def evaluate(self, x: float) -> float:
        return self.regions()[self.region_index(x)][2]


@dataclass(frozen=True)
class JumpParameters:
    """Transmission data (alpha_i, gamma_i) at the two jump points.

    The derivative multipliers beta_i = 1/alpha_i are derived, never stored,
    so beta_i * alpha_i = 1 holds exactly.
    """

    alpha1: float
    gamma1: float
    alpha2: float
    gamma2: float

    @property
    def beta1(self) -> float:
        return 1.0 / self.alpha1

    @property
    def beta2(self) -> float:
        return 1.0 / self.alpha2

    def of_index(self, which: int):
        """(alpha_i, gamma_i) for which in {1, 2}."""
        if which == 1:
            return self.alpha1, self.gamma1
        if which == 2:
            return self.alpha2, self.gamma2
        raise ValueError("jump index must be 1 or 2")


@dataclass(frozen=True)
class PencilProblem:
    """Full problem description.

    Jump locations are the density breakpoints p1, p2 by construction
    (JumpParameters carries no positions of its own), which keeps the
    coupling between the density profile and the transmission conditions
    impossible to violate.
    """

    p: CoefficientFunction
    q: CoefficientFunction
    density: DensityProfile
    jumps: JumpParameters


class Violation(NamedTuple):
    path: str
    message: str


class ScreenResult(NamedTuple):
    passed: bool
    min_quotient: float


def _check_breakpoints(name, cf, out):
    bp = cf.breakpoints
    for b in bp:
        if not 0.0 <= b <= PI:
            out.append(Violation(f"{name}.breakpoints", "breakpoints must lie in [0, pi]"))
            break
    for i in range(len(bp) - 1):
        if bp[i + 1] <= bp[i]:
            out.append(
                Violation(f"{name}.breakpoints", "breakpoints must be strictly increasing")
            )
            break


def validate(problem: PencilProblem, *, allow_identity: bool = False) -> list:
    """Collect every violated model invariant (empty list means valid).

    Never raises; validation is pure and idempotent. `allow_identity` is a
    test-only relaxation that skips the alpha != 1, beta != 1 density rules
    and the non-identity jump rule, so that the classical no-jump operator
    can be driven through the same machinery.
    """
    out = []
    _check_breakpoints("p", problem.p, out)
    _check_breakpoints("q", problem.q, out)

    d = problem.density
    if not (0.0 < d.p1 < d.p2 < PI):
        out.append(Violation("density", "0 < p1 < p2 < pi must hold"))
    if d.alpha <= 0.0:
        out.append(Violation("density.alpha", "alpha must be positive"))
    elif d.alpha == 1.0 and not allow_identity:
        out.append(Violation("density.alpha", "alpha must differ from 1"))
    if d.beta <= 0.0:
        out.append(Violation("density.beta", "beta must be positive"))
    elif d.beta == 1.0 and not allow_identity:
        out.append(Violation("density.beta", "beta must differ from 1"))

    j = problem.jumps
    for idx, (a, g) in ((1, (j.alpha1, j.gamma1)), (2, (j.alpha2, j.gamma2))):
        if a == 0.0:
            out.append(Violation(f"jumps.alpha{idx}", "alpha_i must be nonzero"))
        elif abs(a - 1.0) ** 2 + g ** 2 == 0.0 and not allow_identity:
            out.append(
                Violation(
                    f"jumps.alpha{idx}",
                    f"|alpha{idx}-1|^2+gamma{idx}^2 != 0 fails",
                )
            )
    return out


def evaluate_delta(problem: PencilProblem, x: float) -> float:
    """Density value at x; raises at the jump points themselves.

    The propagator never samples the density at p1/p2 (it stops and restarts
    on either side), so a request exactly there indicates a meshing bug and
    is surfaced as an error instead of being given a one-sided value.
    """
    if not 0.0 <= x <= PI:
        raise ValueError("x outside [0, pi]")
    return problem.density.evaluate(x)


def positivity_screen(q: CoefficientFunction, trial_count: int) -> ScreenResult:
    """Screen the quadratic-form positivity condition on a cosine family.

    Evaluates the Rayleigh quotient
        ( integral |y'|^2 + q |y|^2 ) / ( integral |y|^2 )
    over the trial family y_k(x) = cos((k - 1/2) x), k = 1..trial_count,
    which satisfies the boundary conditions y'(0) = 0, y(pi) = 0. Returns
    the minimum quotient and passed = (minimum > 0). A finite trial family
    can only refute positivity, not prove it; this is a screen.
    """
    if trial_count < 4:
        raise ValueError("trial_count must be at least 4")
    qb, qc = q.piece_arrays()
    best = math.inf
    for k in range(1, trial_count + 1):
        mu = k - 0.5
        # integral of |y'|^2 = mu^2 * pi/2; integral of |y|^2 = pi/2 exactly
        nodes, weights = quadrature.composite_gauss(0.0, PI, 2.0 * mu)
        qvals = piecewise_eval(qb, qc, nodes)
        pot = float(np.sum(weights * qvals * np.cos(mu * nodes) ** 2))
        quot = (mu * mu * (PI / 2.0) + pot) / (PI / 2.0)
        best = min(best, quot)
    return ScreenResult(passed=best > 0.0, min_quotient=best)


def piecewise_eval(breaks, coefs, xs):
    """Vectorized piecewise-polynomial evaluation (right-continuous)."""
    idx = np.clip(np.searchsorted(breaks, xs, side="right") - 1, 0, len(coefs) - 1)
    t = xs - breaks[idx]
    acc = np.zeros_like(t)
    for j in range(coefs.shape[1] - 1, -1, -1):
        acc = acc * t + coefs[idx, j]
    return acc


# ---------------------------------------------------------------------------
# JSON problem schema (strict: unknown keys are rejected)

def _require_keys(obj, allowed, where):
    if not isinstance(obj, dict):
        raise SchemaError(f"{where}: expected an object")
    unknown = set(obj) - set(allowed)
    if unknown:
        raise SchemaError(f"{where}: unknown key {sorted(unknown)[0]!r}")
    missing = set(allowed) - set(obj)
    if missing:
        raise SchemaError(f"{where}: missing key {sorted(missing)[0]!r}")


def coefficient_from_dict(obj, where) -> CoefficientFunction:
    _require_keys(obj, ("kind", "breakpoints", "values"), where)
    try:
        return CoefficientFunction(obj["kind"], tuple(obj["breakpoints"]), tuple(obj["values"]))
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"{where}: {exc}") from exc


def coefficient_to_dict(cf: CoefficientFunction) -> dict:
    values = (
        [list(piece) for piece in cf.values]
        if cf.kind == "piecewise-polynomial"
        else list(cf.values)
    )
    return {"kind": cf.kind, "breakpoints": list(cf.breakpoints), "values": values}


def problem_from_dict(obj) -> PencilProblem:
    """Parse the strict problem schema; raises SchemaError with key context."""
    _require_keys(obj, ("p", "q", "density", "jumps"), "problem")
    _require_keys(obj["density"], ("alpha", "beta", "p1", "p2"), "density")
    _require_keys(obj["jumps"], ("alpha1", "gamma1", "alpha2", "gamma2"), "jumps")
    p = coefficient_from_dict(obj["p"], "p")
    q = coefficient_from_dict(obj["q"], "q")
    try:
        density = DensityProfile(
            float(obj["density"]["alpha"]),
            float(obj["density"]["beta"]),
            float(obj["density"]["p1"]),
            float(obj["density"]["p2"]),
        )
        jumps = JumpParameters(
            float(obj["jumps"]["alpha1"]),
            float(obj["jumps"]["gamma1"]),
            float(obj["jumps"]["alpha2"]),
            float(obj["jumps"]["gamma2"]),
        )
    except (TypeError, ValueError) as exc:
        raise SchemaError(str(exc)) from exc
    return PencilProblem(p=p, q=q, density=density, jumps=jumps)


def problem_to_dict(problem: PencilProblem) -> dict:
    d, j = problem.density, problem.jumps
    return {
        "p": coefficient_to_dict(problem.p),
        "q": coefficient_to_dict(problem.q),
        "density": {"alpha": d.alpha, "beta": d.beta, "p1": d.p1, "p2": d.p2},
        "jumps": {
            "alpha1": j.alpha1,
            "gamma1": j.gamma1,
            "alpha2": j.alpha2,
            "gamma2": j.gamma2,
        },
    }
