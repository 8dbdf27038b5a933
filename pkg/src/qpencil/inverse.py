"""Finite-dimensional inverse problem: recover parameters from Weyl samples.

Uniqueness of the operator given its Weyl function is exercised at desk
scale: a ParameterFamily carves a low-dimensional slice (region constants,
jump data, density steps) through problem space, and `fit` recovers the
slice coordinates from M(lam) samples by derivative-free least squares.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    AtPoleError,
    EmptyGridError,
    NoConvergenceError,
    PoleCollisionError,
    ValidationError,
)
from .model import (
    CoefficientFunction,
    DensityProfile,
    JumpParameters,
    PencilProblem,
    Violation,
    validate,
)
from .util import pmap
from .weyl import weyl_function

PARAM_NAMES = (
    "q_const_region1", "q_const_region2", "q_const_region3",
    "p_const_region1", "p_const_region2", "p_const_region3",
    "alpha1", "gamma1", "alpha2", "gamma2", "alpha", "beta",
)

# keep optimizer iterates a safe distance from the degenerate boundaries
# (alpha_i = 0; alpha or beta = 0 or 1) that model validation rejects
_MARGIN = 0.05


@dataclass(frozen=True)
class ParameterFamily:
    """A named, box-bounded slice through problem space.

    names picks coordinates from PARAM_NAMES; bounds holds one closed
    (lo, hi) interval per name; base_problem supplies every field the
    family does not touch.
    """

    names: tuple
    bounds: tuple
    base_problem: PencilProblem

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(
            self, "bounds",
            tuple((float(lo), float(hi)) for lo, hi in self.bounds))


def validate_family(family: ParameterFamily):
    """Structural checks; returns a list of Violations (empty when fine)."""
    out = []
    seen = set()
    for i, name in enumerate(family.names):
        where = f"names[{i}]"
        if name not in PARAM_NAMES:
            out.append(Violation(where, f"unknown parameter {name!r}"))
        if name in seen:
            out.append(Violation(where, f"duplicate parameter {name!r}"))
        seen.add(name)
    if len(family.bounds) != len(family.names):
        out.append(Violation("bounds", "one (lo, hi) pair per name required"))
        return out
    for name, (lo, hi) in zip(family.names, family.bounds):
        where = f"bounds[{name}]"
        if not (math.isfinite(lo) and math.isfinite(hi)):
            out.append(Violation(where, "bounds must be finite"))
            continue
        if lo >= hi:
            out.append(Violation(where, f"empty interval [{lo}, {hi}]"))
            continue
        if name in ("alpha", "beta"):
            if lo < _MARGIN:
                out.append(Violation(
                    where, f"density steps need lo >= {_MARGIN}"))
            if lo < 1.0 + _MARGIN and hi > 1.0 - _MARGIN:
                out.append(Violation(
                    where,
                    f"interval must avoid 1.0 by margin {_MARGIN} "
                    "(identity density is degenerate)"))
        if name in ("alpha1", "alpha2"):
            if lo < _MARGIN and hi > -_MARGIN:
                out.append(Violation(
                    where,
                    f"interval must avoid 0.0 by margin {_MARGIN} "
                    "(jump scale must not vanish)"))
    return out


def _require_family(family):
    violations = validate_family(family)
    if violations:
        raise ValidationError(violations)


def _as_vector(family, params):
    if isinstance(params, dict):
        unknown = set(params) - set(family.names)
        if unknown:
            raise ValueError(f"parameter {sorted(unknown)[0]!r} not in family")
        missing = set(family.names) - set(params)
        if missing:
            raise ValueError(f"parameter {sorted(missing)[0]!r} missing")
        vec = np.array([float(params[n]) for n in family.names])
    else:
        vec = np.asarray(params, dtype=float)
        if vec.shape != (len(family.names),):
            raise ValueError(
                f"expected {len(family.names)} parameters, got {vec.shape}")
    for name, (lo, hi), v in zip(family.names, family.bounds, vec):
        if not lo <= v <= hi:
            raise ValueError(
                f"parameter {name}={v} outside bounds [{lo}, {hi}]")
    return vec


def _region_constants(cf: CoefficientFunction, density: DensityProfile):
    return [float(cf.evaluate(0.5 * (a + b))) for a, b, _ in density.regions()]


def realize(family: ParameterFamily, params) -> PencilProblem:
    """Instantiate the family at a parameter point (validated strictly)."""
    _require_family(family)
    vec = _as_vector(family, params)
    base = family.base_problem
    d = base.density
    jv = {"alpha1": base.jumps.alpha1, "gamma1": base.jumps.gamma1,
          "alpha2": base.jumps.alpha2, "gamma2": base.jumps.gamma2}
    alpha, beta = d.alpha, d.beta
    q_regions = None
    p_regions = None
    for name, val in zip(family.names, vec):
        if name in jv:
            jv[name] = float(val)
        elif name == "alpha":
            alpha = float(val)
        elif name == "beta":
            beta = float(val)
        elif name.startswith("q_const_region"):
            if q_regions is None:
                q_regions = _region_constants(base.q, d)
            q_regions[int(name[-1]) - 1] = float(val)
        else:
            if p_regions is None:
                p_regions = _region_constants(base.p, d)
            p_regions[int(name[-1]) - 1] = float(val)
    dens = DensityProfile(alpha=alpha, beta=beta, p1=d.p1, p2=d.p2)

    def regionwise(vals, fallback):
        if vals is None:
            return fallback
        return CoefficientFunction("piecewise-constant", (d.p1, d.p2),
                                   tuple(vals))

    prob = PencilProblem(p=regionwise(p_regions, base.p),
                         q=regionwise(q_regions, base.q),
                         density=dens, jumps=JumpParameters(**jv))
    violations = validate(prob)
    if violations:
        raise ValidationError(violations)
    return prob


def _sample_pairs(target_samples):
    out = []
    for s in target_samples:
        lam = getattr(s, "lam", None)
        if lam is not None:
            out.append((complex(lam), complex(s.m)))
        else:
            lam, m = s
            out.append((complex(lam), complex(m)))
    return out


def _weyl_with_retry(problems, lam, step_control):
    """Evaluate M for each problem at a common point, dodging poles once.

    If any evaluation lands on a pole the whole point is pushed off-axis by
    1e-6*(1+|lam|)i and retried; a second hit raises PoleCollisionError so
    the caller sees the collision instead of a silently moved grid.
    """
    try:
        return [weyl_function(p, lam, step_control) for p in problems]
    except AtPoleError:
        pushed = lam + 1j * 1e-6 * (1.0 + abs(lam))
        try:
            return [weyl_function(p, pushed, step_control) for p in problems]
        except AtPoleError as exc:
            raise PoleCollisionError(
                f"pole collision at lambda={lam} persists after the "
                "off-axis push") from exc


def misfit(family, params, target_samples, step_control=None) -> float:
    """Sum of squared |M_model - M_target| over the sample grid."""
    _require_family(family)
    pairs = _sample_pairs(target_samples)
    if not pairs:
        raise EmptyGridError("no target samples")
    prob = realize(family, params)

    def one(pair):
        lam, m_target = pair
        m_model = _weyl_with_retry([prob], lam, step_control)[0]
        return abs(m_model - m_target) ** 2

    return float(sum(pmap(one, pairs)))


def _nelder_mead(fn, x0, bounds, max_iter, diam_tol):
    """Box-clipped Nelder-Mead (reflect 1, expand 2, contract 0.5, shrink 0.5).

    Returns (x_best, f_best, iterations, converged). Convergence is a
    simplex infinity-norm diameter below diam_tol.
    """
    lo = np.array([b[0] for b in bounds])
    hi = np.array([b[1] for b in bounds])

    def clip(x):
        return np.minimum(np.maximum(x, lo), hi)

    n = len(x0)
    pts = [clip(np.array(x0, dtype=float))]
    for i in range(n):
        step = 0.05 * (hi[i] - lo[i])
        p = pts[0].copy()
        p[i] = p[i] + step if p[i] + step <= hi[i] else p[i] - step
        pts.append(p)
    vals = [fn(p) for p in pts]

    iters = 0
    converged = False
    while iters < max_iter:
        order = sorted(range(n + 1), key=lambda k: vals[k])
        pts = [pts[k] for k in order]
        vals = [vals[k] for k in order]
        diam = max(np.max(np.abs(p - pts[0])) for p in pts[1:])
        if diam < diam_tol:
            converged = True
            break
        iters += 1
        centroid = np.mean(pts[:-1], axis=0)
        worst = pts[-1]
        xr = clip(centroid + (centroid - worst))
        fr = fn(xr)
        if fr < vals[0]:
            xe = clip(centroid + 2.0 * (centroid - worst))
            fe = fn(xe)
            if fe < fr:
                pts[-1], vals[-1] = xe, fe
            else:
                pts[-1], vals[-1] = xr, fr
        elif fr < vals[-2]:
            pts[-1], vals[-1] = xr, fr
        else:
            # contract toward the better of the reflected/worst points
            if fr < vals[-1]:
                xc = clip(centroid + 0.5 * (xr - centroid))
            else:
                xc = clip(centroid + 0.5 * (worst - centroid))
            fc = fn(xc)
            if fc < min(fr, vals[-1]):
                pts[-1], vals[-1] = xc, fc
            else:
                for k in range(1, n + 1):
                    pts[k] = clip(pts[0] + 0.5 * (pts[k] - pts[0]))
                    vals[k] = fn(pts[k])
    best = int(np.argmin(vals))
    return pts[best], float(vals[best]), iters, converged


@dataclass(frozen=True)
class FitResult:
    """Outcome of a parameter recovery run."""

    params: dict
    objective: float
    iterations: int
    converged: bool
    residuals: tuple


def fit(family, target_samples, seed=0, restarts=8, max_iter=2000,
        diam_tol=1e-9, step_control=None) -> FitResult:
    """Recover family parameters from Weyl samples by restarted Nelder-Mead.

    Needs at least 2 samples per parameter. Restarts begin at the bounds
    center plus seeded uniform draws (all start points are generated up
    front so threading cannot reorder the randomness); the best restart by
    (objective, restart index) wins. Pole-colliding iterates score inf so
    the simplex backs away from them. Raises NoConvergenceError (best
    attached) when no restart meets the diameter tolerance.
    """
    _require_family(family)
    pairs = _sample_pairs(target_samples)
    nparams = len(family.names)
    if len(pairs) < 2 * nparams:
        raise ValueError(
            f"need at least {2 * nparams} samples for {nparams} parameters, "
            f"got {len(pairs)}")
    lo = np.array([b[0] for b in family.bounds])
    hi = np.array([b[1] for b in family.bounds])
    rng = np.random.default_rng(seed)
    starts = [0.5 * (lo + hi)]
    for _ in range(max(0, restarts - 1)):
        starts.append(rng.uniform(lo, hi))

    def objective(x):
        try:
            return misfit(family, x, pairs, step_control)
        except PoleCollisionError:
            return math.inf

    def run(start):
        return _nelder_mead(objective, start, family.bounds, max_iter,
                            diam_tol)

    outcomes = pmap(run, starts)
    total_iters = sum(o[2] for o in outcomes)
    best_idx = min(range(len(outcomes)),
                   key=lambda k: (outcomes[k][1], k))
    xb, fb, _, _ = outcomes[best_idx]
    converged = any(o[3] for o in outcomes)
    prob = realize(family, xb)
    residuals = tuple(
        abs(_weyl_with_retry([prob], lam, step_control)[0] - m)
        for lam, m in pairs)
    result = FitResult(
        params={n: float(v) for n, v in zip(family.names, xb)},
        objective=fb, iterations=total_iters,
        converged=bool(outcomes[best_idx][3]), residuals=residuals)
    if not converged:
        raise NoConvergenceError(
            f"no restart converged within {max_iter} iterations", result)
    return result


def distinguishability(problem_a, problem_b, grid, step_control=None) -> dict:
    """Max Weyl-function gap between two problems over a shared grid.

    separable means max |M_a - M_b| exceeded 1e-6; identical problems sit
    at rounding level, and parameter changes below ~1e-12 fall under the
    floor (the documented resolution limit of this test).
    """
    for label, prob in (("a", problem_a), ("b", problem_b)):
        violations = validate(prob, allow_identity=True)
        if violations:
            raise ValidationError(
                [Violation(f"problem_{label}.{v.path}", v.message)
                 for v in violations])
    pts = [complex(g) for g in grid]
    if not pts:
        raise EmptyGridError("empty comparison grid")

    def one(lam):
        ma, mb = _weyl_with_retry([problem_a, problem_b], lam, step_control)
        return abs(ma - mb)

    gaps = pmap(one, pts)
    max_gap = float(max(gaps))
    return {"max_gap": max_gap, "separable": max_gap > 1e-6}
