"""End-to-end acceptance checks, one verdict line per shipped guarantee.

Every test prints "criterion N: PASS/FAIL - detail (t s)" before asserting,
so the verdict survives in the captured output either way. Criterion 6 is a
known red, kept failing on purpose: the raw gap product
(lambda_n - n pi / D) * n pi / D on the commensurate profiles grows by about
28% between the two index windows, past the allowed 20%, because n pi / D is
the wrong comparison root for a piecewise density (the bounded oscillation
sits around the roots of the explicit q = 0 model instead). The note test
right after it shows the model-root variant of the same quantity staying
bounded, and the windowed ratio passing, on the same profiles.
"""
import cmath
import math
import random
import time

import numpy as np

from qpencil import problems
from qpencil.inverse import ParameterFamily, distinguishability, fit, realize
from qpencil.model import PI, evaluate_delta
from qpencil.oracle import oracle_delta, region_q_values
from qpencil.propagator import (StepControl, sample_forward, solve_phi,
                                solve_s, wronskian)
from qpencil.spectral import (asymptotic_table, check_lemma4,
                              check_orthogonality, find_eigenvalues,
                              scan_characteristic)
from qpencil.weyl import (default_offaxis_grid, sample_weyl_grid,
                          weyl_function, weyl_solution)

TIGHT = StepControl(atol=1e-12, rtol=1e-12)

# Real-spectrum fixtures for the eigenvalue identities. The gamma fixtures
# are excluded: with gamma_i != 0 the spectrum is genuinely complex and the
# derivative/orthogonality identities below are stated for real eigenvalues
# (test_spectral.py::test_gamma_fixture_flags_imaginary_residual measures
# how they degrade there).
def _real_spectrum_fixtures():
    return [
        ("trivial", problems.trivial()),
        ("jump-plain", problems.jump_plain()),
        ("jump-q1", problems.jump_q1()),
        ("drift", problems.drift()),
        ("commensurate q=0", problems.commensurate(0.0)),
        ("commensurate q=1", problems.commensurate(1.0)),
    ]


def _verdict(num, ok, detail, t0):
    status = "PASS" if ok else "FAIL"
    print(f"criterion {num}: {status} - {detail} "
          f"({time.perf_counter() - t0:.2f} s)")
    return ok


def test_criterion_1_trivial_eigenvalues():
    t0 = time.perf_counter()
    recs = find_eigenvalues(problems.trivial(), 10.2)
    elapsed = time.perf_counter() - t0
    errs = [abs(r.lambda_n - (n + 0.5)) for n, r in enumerate(recs[:10])]
    ok = len(recs) >= 10 and max(errs) <= 1e-8 and elapsed < 5.0
    assert _verdict(
        1, ok,
        f"first 10 roots off n+1/2 by at most {max(errs):.2e} "
        f"(budget 5 s)", t0)


def test_criterion_2_shooting_matches_transfer_matrices():
    t0 = time.perf_counter()
    grid = [0.1 * k for k in range(1, 501)]
    worst = 0.0
    for name in ("jump-plain", "jump-gamma", "jump-gamma-q"):
        prob = problems.get(name)
        qv = region_q_values(prob)
        for s in scan_characteristic(prob, grid, step_control=TIGHT):
            ref = oracle_delta(prob.density, prob.jumps, s.lam, qv)
            worst = max(worst, abs(s.delta - ref) / max(1.0, abs(ref)))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-8 and elapsed < 30.0
    assert _verdict(
        2, ok,
        f"3 fixtures x 500 lambdas, worst |Delta_shoot - Delta_ref| / "
        f"max(1, |Delta|) = {worst:.2e} (budget 30 s)", t0)


def test_criterion_3_wronskian_constant_through_jumps():
    t0 = time.perf_counter()
    rng = random.Random(20260815)
    names = sorted(problems.REGISTRY)
    worst = 0.0
    for i in range(20):
        prob = problems.get(names[i % len(names)])
        lam = complex(rng.uniform(0.3, 10.0),
                      rng.uniform(-0.5, 0.5) if i % 2 else 0.0)
        w = wronskian(solve_phi(prob, lam), solve_s(prob, lam))
        worst = max(worst, float(np.max(np.abs(w - 1.0))))
    ok = worst <= 1e-8
    assert _verdict(
        3, ok,
        f"20 seeded (fixture, lambda) pairs, max |W[phi, S] - 1| = "
        f"{worst:.2e}", t0)


def test_criterion_4_derivative_identity():
    t0 = time.perf_counter()
    worst = 0.0
    hand = math.inf
    for name, prob in _real_spectrum_fixtures():
        big_d = prob.density.optical_length
        recs = find_eigenvalues(prob, 9.7 * PI / big_d + 1.0)
        assert len(recs) >= 10, (name, len(recs))
        for rec in recs[:10]:
            worst = max(worst, check_lemma4(rec)["relative_error"])
        if name == "trivial":
            hand = abs(recs[0].ddelta - PI)
    ok = worst <= 1e-5 and hand <= 1e-6
    assert _verdict(
        4, ok,
        f"dDelta = -2 lam beta alpha, max rel err {worst:.2e} over first "
        f"10 roots of 6 real-spectrum fixtures (gamma fixtures excluded: "
        f"complex spectrum); trivial dDelta(1/2) off pi by {hand:.1e}", t0)


def test_criterion_5_orthogonality():
    t0 = time.perf_counter()
    worst = 0.0
    for name, prob in _real_spectrum_fixtures():
        big_d = prob.density.optical_length
        recs = find_eigenvalues(prob, 9.7 * PI / big_d + 1.0,
                                compute_extras=False)
        assert len(recs) >= 9, (name, len(recs))
        for a in range(9):
            for b in range(a + 1, 9):
                worst = max(worst, check_orthogonality(prob, recs[a],
                                                       recs[b]))
    ok = worst <= 1e-6
    assert _verdict(
        5, ok,
        f"all pairs n < k <= 8 on 6 real-spectrum fixtures (gamma fixtures "
        f"excluded: complex spectrum), worst residual {worst:.2e}", t0)


def test_criterion_6_gap_product_window():
    t0 = time.perf_counter()
    details = []
    ok = True
    for q_level in (0.0, 1.0):
        prob = problems.commensurate(q_level)
        rows = asymptotic_table(prob, 60)
        lo = max(abs(r.product) for r in rows if 30 <= r.n <= 45)
        hi = max(abs(r.product) for r in rows if 45 <= r.n <= 60)
        ok = ok and hi / lo <= 1.2
        details.append(f"q={q_level:g} window ratio {hi / lo:.4f}")
    dens = prob.density
    nodes, weights = np.polynomial.legendre.leggauss(20)
    quad = 0.0
    for a, b, _eta in dens.regions():
        xs = 0.5 * (b - a) * nodes + 0.5 * (a + b)
        quad += 0.5 * (b - a) * float(
            weights @ np.sqrt([evaluate_delta(prob, x) for x in xs]))
    d_err = abs(quad - dens.optical_length)
    ok = ok and d_err <= 1e-12
    assert _verdict(
        6, ok,
        f"max |(lambda_n - n pi / D) n pi / D| over n in [45, 60] vs "
        f"[30, 45]: {'; '.join(details)} (allowed 1.2); "
        f"|D - integral sqrt(delta)| = {d_err:.1e}", t0)


def test_criterion_6_note_model_root_variant():
    t0 = time.perf_counter()
    prob0 = problems.commensurate(0.0)
    rows0 = asymptotic_table(prob0, 60)
    flat = max(abs(r.model_product) for r in rows0)
    prob1 = problems.commensurate(1.0)
    rows1 = asymptotic_table(prob1, 60)
    lo = max(abs(r.model_product) for r in rows1 if 30 <= r.n <= 45)
    hi = max(abs(r.model_product) for r in rows1 if 45 <= r.n <= 60)
    ok = flat <= 1e-6 and hi <= 1.0 and hi / lo <= 1.2
    print(f"criterion 6 note: PASS - same product against the n-th root of "
          f"the q = 0 model: q=0 max {flat:.1e} (exact roots), q=1 window "
          f"ratio {hi / lo:.4f}, max {hi:.4f} "
          f"({time.perf_counter() - t0:.2f} s)")
    assert ok


def test_criterion_7_weyl_identities():
    t0 = time.perf_counter()
    worst = 0.0
    lam = 2.4 + 0.3j
    mesh = [k * PI / 24 for k in range(1, 24)]
    for name in ("trivial", "jump-plain", "jump-gamma-q"):
        prob = problems.get(name)
        m = weyl_function(prob, lam)
        phi = solve_phi(prob, lam, mesh_hint=mesh)
        s = solve_s(prob, lam, mesh_hint=mesh)
        big = weyl_solution(prob, lam, mesh_hint=mesh)
        scale = float(max(1.0, np.max(np.abs(big.ys()))))
        worst = max(
            worst,
            float(np.max(np.abs(big.ys() - (s.ys() + m * phi.ys())))) / scale,
            float(np.max(np.abs(wronskian(phi, big) - 1.0))),
            abs(big.state_at_start().yprime - 1.0),
            abs(big.state_at_end().y) / scale)
    err_m = abs(weyl_function(problems.trivial(), 0.25) + 4.0)
    ok = worst <= 1e-8 and err_m <= 1e-8
    assert _verdict(
        7, ok,
        f"Phi = S + M phi, W[phi, Phi] = 1, Phi'(0) = 1, Phi(pi) = 0 on 3 "
        f"fixtures at lam = 2.4+0.3j, worst {worst:.2e}; trivial M(1/4) "
        f"off -4 by {err_m:.1e}", t0)


def test_criterion_8_parameter_recovery():
    t0 = time.perf_counter()
    base = problems.jump_plain()
    grid = default_offaxis_grid(16)

    fam1 = ParameterFamily(("q_const_region2",), ((0.0, 2.0),), base)
    target1 = sample_weyl_grid(realize(fam1, {"q_const_region2": 0.8}),
                               grid, ())
    t1 = time.perf_counter()
    res1 = fit(fam1, target1, seed=1, restarts=2, max_iter=400)
    dt1 = time.perf_counter() - t1
    err1 = abs(res1.params["q_const_region2"] - 0.8)

    # truth deliberately off the bounds midpoint (the first simplex start)
    fam2 = ParameterFamily(("alpha1", "gamma1"), ((0.5, 2.5), (-0.5, 0.5)),
                           base)
    target2 = sample_weyl_grid(realize(fam2, {"alpha1": 1.3, "gamma1": 0.2}),
                               grid, ())
    t2 = time.perf_counter()
    res2 = fit(fam2, target2, seed=3, restarts=6, max_iter=600)
    dt2 = time.perf_counter() - t2
    err2 = max(abs(res2.params["alpha1"] - 1.3),
               abs(res2.params["gamma1"] - 0.2))

    sep = distinguishability(realize(fam2, {"alpha1": 1.5, "gamma1": 0.2}),
                             realize(fam2, {"alpha1": 1.5, "gamma1": 0.3}),
                             grid)
    ok = (err1 <= 1e-4 and err2 <= 1e-3 and dt1 < 120.0 and dt2 < 120.0
          and res1.converged and res2.converged and sep["max_gap"] > 1e-6)
    assert _verdict(
        8, ok,
        f"16 off-axis samples: q_const err {err1:.1e} in {dt1:.1f} s, "
        f"(alpha1, gamma1) err {err2:.1e} in {dt2:.1f} s (budget 120 s "
        f"each); gamma1 0.2-vs-0.3 max gap {sep['max_gap']:.2e}", t0)


def _leading_model(problem, lam, x):
    """Large-lambda leading term of the forward solution with data (1, i lam).

    One-way waves exp(i lam s) folded through both interfaces in travel-time
    coordinates s, with reflection/transmission weights from the density
    contrast and the gamma terms. For q = 0 this superposition solves the
    problem exactly; with q != 0 it is the leading order and the remainder
    is O(1/lambda).
    """
    dens, jumps = problem.density, problem.jumps
    a, b = dens.alpha, dens.beta
    p1, p2 = dens.p1, dens.p2
    a1, g1 = jumps.alpha1, jumps.gamma1
    a2, g2 = jumps.alpha2, jumps.gamma2
    b1p = 0.5 * (a1 + (1.0 / a1) / a)
    b1m = 0.5 * (a1 - (1.0 / a1) / a)
    b2p = 0.5 * (a2 + (1.0 / a2) * a / b)
    b2m = 0.5 * (a2 - (1.0 / a2) * a / b)
    if x < p1:
        return cmath.exp(1j * lam * x)
    r1 = b1p + g1 / (2.0 * a)
    r2 = b1m - g1 / (2.0 * a)
    if x < p2:
        return (r1 * cmath.exp(1j * lam * (p1 + a * (x - p1)))
                + r2 * cmath.exp(1j * lam * (p1 - a * (x - p1))))
    sp2 = p1 + a * (p2 - p1)
    sm2 = p1 - a * (p2 - p1)
    r3 = (b2p + g2 / (2.0 * b)) * r1
    r4 = (b2m + g2 / (2.0 * b)) * r2
    r5 = (b2m - g2 / (2.0 * b)) * r1
    r6 = (b2p - g2 / (2.0 * b)) * r2
    return (r3 * cmath.exp(1j * lam * (b * (x - p2) + sp2))
            + r4 * cmath.exp(1j * lam * (b * (x - p2) + sm2))
            + r5 * cmath.exp(1j * lam * (-b * (x - p2) + sp2))
            + r6 * cmath.exp(1j * lam * (-b * (x - p2) + sm2)))


def test_criterion_9_leading_order_decay():
    t0 = time.perf_counter()
    prob = problems.get("jump-gamma-q")
    mesh = [float(x) for x in np.linspace(0.005, PI - 0.005, 241)
            if min(abs(x - prob.density.p1), abs(x - prob.density.p2)) > 1e-9]

    # same density and jumps with q = 0: the model must be exact there
    twin = problems.get("jump-gamma")
    ys0, _ = sample_forward(twin, 40.0, mesh, y0=1.0, yp0=40j,
                            step_control=TIGHT)
    exact = max(abs(ys0[i] - _leading_model(twin, 40.0, x))
                for i, x in enumerate(mesh))

    ds = []
    for lam in (20.0, 40.0, 80.0):
        ys, _ = sample_forward(prob, lam, mesh, y0=1.0, yp0=1j * lam)
        ds.append(max(abs(ys[i] - _leading_model(prob, lam, x))
                      for i, x in enumerate(mesh)))
    r1, r2 = ds[0] / ds[1], ds[1] / ds[2]
    anchors = (1.807193e-02, 9.114606e-03, 4.349037e-03)
    pinned = max(abs(d - ref) / ref for d, ref in zip(ds, anchors))
    ok = exact <= 1e-9 and r1 >= 1.8 and r2 >= 1.8 and pinned <= 1e-4
    assert _verdict(
        9, ok,
        f"max |y - y0| = {ds[0]:.4e} / {ds[1]:.4e} / {ds[2]:.4e} at "
        f"lam = 20 / 40 / 80, decay ratios {r1:.3f}, {r2:.3f} (need 1.8); "
        f"q = 0 twin exact to {exact:.1e}", t0)
