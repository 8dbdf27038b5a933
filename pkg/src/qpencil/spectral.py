"""Characteristic function, eigenvalue enumeration, and spectral identities.

The characteristic function Delta(lam) is the Wronskian of the two boundary
solutions, Delta = psi*phi' - psi'*phi; it is constant in x (the jump
transfers have unit determinant), entire in lam, and its real zeros are the
eigenvalues. delta0 is the explicit zeroth-order model: a four-cosine
combination of the geometric phases that the exact determinant tracks up to
a bounded remainder, so its roots give the large-lam eigenvalue skeleton.
"""
from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import quadrature
from .errors import ClusterUnresolvedError, NumericalError, ValidationError
from .model import PI, PencilProblem, piecewise_eval, positivity_screen, validate
from .propagator import (
    DEFAULT_CONTROL,
    _lowered,
    _shoot,
    psi_endpoints,
    sample_forward,
)
from .util import fmt, pmap


@dataclass(frozen=True)
class CharacteristicSample:
    """One evaluation point of the determinant scan."""

    lam: complex
    delta: complex
    delta0: complex


@dataclass(frozen=True)
class EigenRecord:
    """One eigenvalue with its normalization data and asymptotic diagnostics.

    beta_n is the matching coefficient psi(0, lambda_n) / phi(0, lambda_n)
    (the denominator is exactly 1 by the initial conditions) and alpha_n is
    the normalized number

        alpha_n = integral delta(x) phi^2 dx - (1/lambda_n) integral p(x) phi^2 dx,

    a complex square rather than |phi|^2, so both can carry imaginary parts
    when the jump phases gamma_i are nonzero. lambda_n0 = n*pi/D is the main
    asymptotic term (D the optical length) and residual = lambda_n -
    lambda_n0 stays bounded in n. ddelta is the lam-derivative of the
    characteristic function at the root, by central difference; im_residual
    records |Im Delta(lambda_n)| left over after refining on the real part.
    """

    n: int
    lambda_n: float
    beta_n: complex
    alpha_n: complex
    lambda_n0: float
    residual: float
    ddelta: complex
    im_residual: float


def _require_valid(problem: PencilProblem) -> None:
    violations = validate(problem, allow_identity=True)
    if violations:
        raise ValidationError(violations)


def delta(problem, lam, x_star=None, step_control=None) -> complex:
    """Characteristic function via the Wronskian at an interior point.

    Shoots phi forward from 0 and psi backward from pi, both stopping at
    x_star (default p1/2), and returns psi*phi' - psi'*phi there. The value
    is independent of x_star; evaluating mid-region keeps both partial
    solves cheap.
    """
    _require_valid(problem)
    if x_star is None:
        x_star = 0.5 * problem.density.p1
    lam = complex(lam)
    _, left = _shoot(problem, lam, 1.0, 0.0, x_stop=x_star,
                     control=step_control)
    _, right = _shoot(problem, lam, 0.0, 1.0, backward=True, x_stop=x_star,
                      control=step_control)
    return right.y * left.yprime - right.yprime * left.y


def _delta_fast(problem, lam, control) -> complex:
    # Wronskian collapsed at x=0: phi(0)=1, phi'(0)=0 exactly, so
    # Delta = -psi'(0). One backward solve, no validation, no trace.
    _, st = _shoot(problem, lam, 0.0, 1.0, backward=True, control=control)
    return -st.yprime


def delta0(problem, lam) -> complex:
    """Zeroth-order model determinant (entire four-cosine form).

    Built from the leading-order transmission amplitudes of the two jumps
    and the accumulated geometric/drift phases:

        b1p, b1m = (alpha1 +- 1/(alpha1*alpha)) / 2
        b2p, b2m = (alpha2 +- alpha/(alpha2*beta)) / 2
        R1 = (b1p + gamma1/2alpha) * R0(p1) * exp(-i P2/alpha)
        R2 = (b1m - gamma1/2alpha) * R0(p1) * exp(+i P2/alpha)

    with R0(p1) = exp(-i P1) and P1, P2, P3 the integrals of p over the
    three regions. The four cosines mix the outgoing/reflected optical
    lengths b+- = beta(pi-p2) + sigma+-, s+- = -beta(pi-p2) + sigma+-,
    sigma+- = p1 +- alpha(p2-p1). For p == 0 all coefficients are real and
    the phases are lam times geometric lengths; with identity jumps the sum
    collapses to cos(lam*pi). Note the overall sign convention differs from
    delta (which tends to -cos) -- only root locations and the boundedness
    of |delta - delta0| are meaningful, and both are sign-blind.
    """
    d = problem.density
    j = problem.jumps
    lam = complex(lam)
    al, be = d.alpha, d.beta
    p1v = problem.p.integrate(0.0, d.p1)
    p2v = problem.p.integrate(d.p1, d.p2)
    p3v = problem.p.integrate(d.p2, PI)

    b1p = 0.5 * (j.alpha1 + 1.0 / (j.alpha1 * al))
    b1m = 0.5 * (j.alpha1 - 1.0 / (j.alpha1 * al))
    b2p = 0.5 * (j.alpha2 + al / (j.alpha2 * be))
    b2m = 0.5 * (j.alpha2 - al / (j.alpha2 * be))

    r0 = cmath.exp(-1j * p1v)
    r1 = (b1p + j.gamma1 / (2.0 * al)) * r0 * cmath.exp(-1j * p2v / al)
    r2 = (b1m - j.gamma1 / (2.0 * al)) * r0 * cmath.exp(1j * p2v / al)

    sp = d.p1 + al * (d.p2 - d.p1)
    sm = d.p1 - al * (d.p2 - d.p1)
    tail = be * (PI - d.p2)
    g2 = j.gamma2 / (2.0 * be)
    return ((b2p + g2) * r1 * cmath.cos(lam * (tail + sp) - p3v / be)
            + (b2m + g2) * r2 * cmath.cos(lam * (tail + sm) - p3v / be)
            + (b2m - g2) * r1 * cmath.cos(lam * (-tail + sp) + p3v / be)
            + (b2p - g2) * r2 * cmath.cos(lam * (-tail + sm) + p3v / be))


def scan_characteristic(problem, grid, step_control=None):
    """Evaluate delta and delta0 over an iterable of lam values."""
    _require_valid(problem)
    control = step_control or DEFAULT_CONTROL

    def one(l):
        lc = complex(l)
        return CharacteristicSample(lam=lc,
                                    delta=_delta_fast(problem, lc, control),
                                    delta0=delta0(problem, lc))

    return pmap(one, [complex(l) for l in grid])


def _refine_root(f, a, b, fa, fb, ftol):
    """Bracketed secant refinement with Illinois damping.

    Keeps the sign-change bracket [a, b] while taking secant steps; the
    retained endpoint's value is halved on stalls so convergence never
    degrades past bisection. Stops at |f| <= ftol.
    """
    side = 0
    for _ in range(120):
        denom = fb - fa
        x = b - fb * (b - a) / denom if denom != 0.0 else 0.5 * (a + b)
        if not a < x < b:
            x = 0.5 * (a + b)
        fx = f(x)
        if abs(fx) <= ftol:
            return x
        if (fa < 0.0) != (fx < 0.0):
            b, fb = x, fx
            if side == -1:
                fa *= 0.5
            side = -1
        else:
            a, fa = x, fx
            if side == 1:
                fb *= 0.5
            side = 1
        if b - a <= 1e-15 * max(1.0, abs(b)):
            # bracket at machine width but residual still above ftol
            if min(abs(fa), abs(fb)) <= ftol:
                return a if abs(fa) <= abs(fb) else b
            raise NumericalError(
                f"root refinement stalled near lambda={fmt(0.5 * (a + b))}")
    raise NumericalError(
        f"root refinement did not converge in [{fmt(a)}, {fmt(b)}]")


def _scan_real_roots(f, lambda_min, lambda_max, spacing, refine_tol):
    """Bracket sign changes of f on a uniform grid and refine each root.

    Returns (roots, grid, values, scale) so callers can reuse the sweep for
    diagnostics. scale is max(1, max|f|) over the grid and the refinement
    target is refine_tol * scale.
    """
    if lambda_max <= lambda_min:
        raise ValueError("lambda_max must exceed lambda_min")
    m = max(1, int(math.ceil((lambda_max - lambda_min) / spacing)))
    grid = lambda_min + spacing * np.arange(m + 1)
    values = f(grid)
    scale = max(1.0, float(np.max(np.abs(values))))
    ftol = refine_tol * scale
    roots = []
    for i in range(m):
        fa, fb = values[i], values[i + 1]
        if fa == 0.0:
            roots.append(float(grid[i]))
        elif (fa < 0.0) != (fb < 0.0):
            roots.append(_refine_root(lambda l: float(f(np.array([l]))[0]),
                                      float(grid[i]), float(grid[i + 1]),
                                      float(fa), float(fb), ftol))
    roots = [r for r in roots if r <= lambda_max + 1e-9]
    return roots, grid, values, scale


def delta0_roots(problem, lambda_max, *, lambda_min=1e-3, grid_factor=0.25,
                 refine_tol=1e-12):
    """Real roots of the zeroth-order model, ascending from lambda_min.

    Only defined for p == 0, where delta0 is real on the real axis; a
    nonzero drift makes it genuinely complex there and a real sign-change
    scan is meaningless.
    """
    _require_valid(problem)
    if not problem.p.is_zero:
        raise NumericalError(
            "zeroth-order model is complex for nonzero p; no real root scan")
    spacing = grid_factor * PI / problem.density.optical_length

    def f(arr):
        return np.array([delta0(problem, l).real for l in np.atleast_1d(arr)])

    roots, _, _, _ = _scan_real_roots(f, lambda_min, lambda_max, spacing,
                                      refine_tol)
    return roots


def _quad_nodes(problem, freq_scale):
    """Gauss nodes over every smooth piece of [0, pi], with local data.

    Pieces are the density regions further cut at p/q breakpoints (the
    integrands lose smoothness there). Returns (xs, ws, dvals, pvals):
    ascending strictly-interior nodes, weights, density values, p values.
    """
    pb, pc, qb, qc = _lowered(problem)
    cuts = sorted({float(c) for c in pb} | {float(c) for c in qb})
    xs_parts, ws_parts, dv_parts = [], [], []
    for a, b, eta in problem.density.regions():
        inner = [c for c in cuts if a < c < b]
        edges = [a, *inner, b]
        om = freq_scale * math.sqrt(eta)
        for lo, hi in zip(edges[:-1], edges[1:]):
            if hi <= lo:
                continue
            nodes, weights = quadrature.composite_gauss(lo, hi, om)
            xs_parts.append(nodes)
            ws_parts.append(weights)
            dv_parts.append(np.full(nodes.size, eta))
    xs = np.concatenate(xs_parts)
    ws = np.concatenate(ws_parts)
    dvals = np.concatenate(dv_parts)
    pvals = piecewise_eval(pb, pc, xs)
    return xs, ws, dvals, pvals


def normalized_alpha(problem, lam, step_control=None) -> complex:
    """Normalized number: integral of delta*phi^2 minus (1/lam) integral p*phi^2.

    phi is the left boundary solution at lam; the squares are complex
    squares, not magnitudes, so the result can be complex for gamma != 0.
    """
    lam = complex(lam)
    xs, ws, dvals, pvals = _quad_nodes(problem, 2.0 * abs(lam) + 4.0)
    ys, _ = sample_forward(problem, lam, xs, step_control=step_control)
    y2 = ys * ys
    out = np.sum(ws * dvals * y2)
    if not problem.p.is_zero:
        out = out - np.sum(ws * pvals * y2) / lam
    return complex(out)


def find_eigenvalues(problem, lambda_max, *, lambda_min=1e-3, grid_factor=0.25,
                     refine_tol=1e-10, im_tol=1e-6, step_control=None,
                     compute_extras=True):
    """Locate real eigenvalues in [lambda_min, lambda_max], ascending.

    Sweeps Re Delta on a grid with spacing grid_factor * pi/D (D the
    optical length; the default quarter-gap spacing is Nyquist-safe for the
    cosine clusters delta0 predicts), brackets sign changes, and refines
    each to |Re Delta| <= refine_tol * scale where scale normalizes by the
    sweep's largest |Delta|. Each root becomes an EigenRecord; alpha_n
    costs one extra forward solve per root and can be skipped with
    compute_extras=False (the field is then NaN).

    A failed positivity screen warns and proceeds. Two roots closer than
    1e-8 * max(1, lam) raise ClusterUnresolvedError rather than silently
    merging. With gamma != 0 the determinant is genuinely complex on the
    real axis; roots are refined on the real part and the leftover
    |Im Delta| is recorded per root (warning if any exceeds im_tol * scale).
    """
    _require_valid(problem)
    control = step_control or DEFAULT_CONTROL
    screen = positivity_screen(problem.q, 8)
    if not screen.passed:
        warnings.warn(
            "positivity screen failed (min quotient "
            f"{screen.min_quotient:.3e}); eigenvalues may leave the real "
            "axis; proceeding", stacklevel=2)
    d = problem.density
    big_d = d.optical_length
    spacing = grid_factor * PI / big_d

    def f(arr):
        vals = pmap(lambda l: _delta_fast(problem, complex(l), control),
                    [float(l) for l in np.atleast_1d(arr)])
        return np.array(vals)

    if lambda_max <= lambda_min:
        raise ValueError("lambda_max must exceed lambda_min")
    m = max(1, int(math.ceil((lambda_max - lambda_min) / spacing)))
    grid = lambda_min + spacing * np.arange(m + 1)
    dvals = f(grid)
    re = dvals.real
    absd = np.abs(dvals)
    scale = max(1.0, float(absd.max()))
    ftol = refine_tol * scale

    roots = []
    for i in range(m):
        fa, fb = float(re[i]), float(re[i + 1])
        if fa == 0.0:
            roots.append(float(grid[i]))
        elif (fa < 0.0) != (fb < 0.0):
            roots.append(_refine_root(
                lambda l: _delta_fast(problem, complex(l), control).real,
                float(grid[i]), float(grid[i + 1]), fa, fb, ftol))
    roots = sorted(r for r in roots if r <= lambda_max + 1e-9)

    for r1, r2 in zip(roots, roots[1:]):
        if r2 - r1 <= 1e-8 * max(1.0, r2):
            raise ClusterUnresolvedError(
                f"cluster unresolved near lambda={fmt(r1)} "
                f"(neighbor at {fmt(r2)})")

    # A conjugate pair just off the axis shows up as a deep |Delta| dip
    # with no sign change; flag it instead of silently skipping.
    for i in range(1, m):
        no_bracket = (re[i - 1] < 0.0) == (re[i] < 0.0) \
            and (re[i] < 0.0) == (re[i + 1] < 0.0)
        if no_bracket and absd[i] < absd[i - 1] and absd[i] < absd[i + 1] \
                and absd[i] <= 1e-3 * scale:
            warnings.warn(
                f"possible complex eigenvalue pair near lambda="
                f"{grid[i]:.6f} (|Delta| dips to {absd[i]:.3e})",
                stacklevel=2)

    gamma_active = problem.jumps.gamma1 != 0.0 or problem.jumps.gamma2 != 0.0

    def build(item):
        n, root = item
        lamc = complex(root)
        psi0, _ = psi_endpoints(problem, lamc, control)
        droot = _delta_fast(problem, lamc, control)
        h = 1e-5 * max(1.0, abs(root))
        dd = (_delta_fast(problem, complex(root + h), control)
              - _delta_fast(problem, complex(root - h), control)) / (2.0 * h)
        alpha = (normalized_alpha(problem, lamc, control)
                 if compute_extras else complex(float("nan")))
        lam0 = n * PI / big_d
        return EigenRecord(n=n, lambda_n=root, beta_n=psi0, alpha_n=alpha,
                           lambda_n0=lam0, residual=root - lam0, ddelta=dd,
                           im_residual=abs(droot.imag))

    records = pmap(build, list(enumerate(roots)))

    if gamma_active:
        worst = max((r.im_residual for r in records), default=0.0)
        if worst > im_tol * scale:
            warnings.warn(
                f"|Im Delta| residual {worst:.3e} at a located root exceeds "
                f"{im_tol:.1e} * scale; treat realness with caution",
                stacklevel=2)
    for r in records:
        if abs(r.beta_n) < 1e-10:
            warnings.warn(
                f"beta_{r.n} is suspiciously small ({abs(r.beta_n):.3e}); "
                "the matching constant should never vanish", stacklevel=2)
    return records


def check_lemma4(record: EigenRecord) -> dict:
    """Derivative identity at an eigenvalue: Delta'(lam_n) = -2 lam_n beta_n alpha_n.

    Returns {lhs, rhs, relative_error} with lhs the measured central
    difference from the record and rhs the product form.
    """
    lhs = record.ddelta
    rhs = -2.0 * record.lambda_n * record.beta_n * record.alpha_n
    denom = max(abs(lhs), abs(rhs), 1e-300)
    return {"lhs": lhs, "rhs": rhs,
            "relative_error": abs(lhs - rhs) / denom}


def check_orthogonality(problem, rec_n: EigenRecord, rec_k: EigenRecord,
                        step_control=None):
    """Weighted orthogonality residual of two eigenfunctions.

    Evaluates (lam_n + lam_k) * integral delta y_n y_k
    - 2 * integral p y_n y_k with y = phi(., lam). For n != k this vanishes
    in exact arithmetic; the return value is |LHS| normalized by
    (lam_n + lam_k) and the delta-weighted norms. For n == k the raw
    diagonal value is returned instead (it equals 2 lam_n alpha_n).
    """
    lam_n = complex(rec_n.lambda_n)
    lam_k = complex(rec_k.lambda_n)
    xs, ws, dvals, pvals = _quad_nodes(
        problem, abs(lam_n) + abs(lam_k) + 4.0)
    yn, _ = sample_forward(problem, lam_n, xs, step_control=step_control)
    yk, _ = sample_forward(problem, lam_k, xs, step_control=step_control)
    prod = yn * yk
    lhs = (lam_n + lam_k) * np.sum(ws * dvals * prod) \
        - 2.0 * np.sum(ws * pvals * prod)
    if rec_n.n == rec_k.n:
        return complex(lhs)
    norm_n = math.sqrt(float(np.sum(ws * dvals * np.abs(yn) ** 2)))
    norm_k = math.sqrt(float(np.sum(ws * dvals * np.abs(yk) ** 2)))
    return float(abs(lhs) / (abs(lam_n + lam_k) * norm_n * norm_k))


@dataclass(frozen=True)
class AsymptoticRow:
    """One line of the eigenvalue asymptotics table.

    gap = lambda_n - lambda_n0 and product = gap * lambda_n0; boundedness
    of the product in n is the content of the second-order asymptotics.
    The model_* columns compare against the n-th real root of delta0
    instead of the raw main term (NaN when the model roots are unavailable
    or exhausted).
    """

    n: int
    lambda_n: float
    lambda_n0: float
    gap: float
    product: float
    model_root: float
    model_gap: float
    model_product: float


def asymptotic_table(problem, N: int, *, step_control=None,
                     with_model_roots=None):
    """First N+1 eigenvalues against their asymptotic predictions.

    with_model_roots defaults to p.is_zero (the model root scan needs a
    real delta0). Raises NumericalError if fewer than N+1 eigenvalues are
    found below the scan ceiling.
    """
    if N < 5:
        raise ValueError("asymptotic table needs N >= 5")
    _require_valid(problem)
    big_d = problem.density.optical_length
    lam_max = (N + 1.5) * PI / big_d + 1.0
    records = find_eigenvalues(problem, lam_max, step_control=step_control,
                               compute_extras=False)
    if len(records) < N + 1:
        raise NumericalError(
            f"found {len(records)} eigenvalues below {fmt(lam_max)}, "
            f"need {N + 1}")
    if with_model_roots is None:
        with_model_roots = problem.p.is_zero
    model = delta0_roots(problem, lam_max) if with_model_roots else []
    rows = []
    nan = float("nan")
    for rec in records[:N + 1]:
        if rec.n < len(model):
            mr = model[rec.n]
            mg = rec.lambda_n - mr
            mp = mg * mr
        else:
            mr = mg = mp = nan
        rows.append(AsymptoticRow(
            n=rec.n, lambda_n=rec.lambda_n, lambda_n0=rec.lambda_n0,
            gap=rec.residual, product=rec.residual * rec.lambda_n0,
            model_root=mr, model_gap=mg, model_product=mp))
    return rows
