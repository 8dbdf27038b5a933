"""Characteristic function, eigenvalue location, normalization identities."""

import math
import warnings

import pytest

from qpencil import problems
from qpencil.errors import NumericalError, ValidationError
from qpencil.model import PI, DensityProfile, PencilProblem
from qpencil.oracle import oracle_delta, region_q_values
from qpencil.spectral import (
    asymptotic_table,
    check_lemma4,
    check_orthogonality,
    delta,
    delta0,
    delta0_roots,
    find_eigenvalues,
    normalized_alpha,
    scan_characteristic,
)


def test_delta_trivial_closed_form():
    import cmath

    prob = problems.trivial()
    for lam in (0.3, 1.0, 4.7, 1.5 + 0.4j):
        want = -cmath.cos(complex(lam) * PI)
        assert abs(delta(prob, lam) - want) < 1e-9 * max(1.0, abs(want))
    # lam = 2.5 sits exactly on a root
    assert abs(delta(prob, 2.5)) < 1e-8


def test_delta_independent_of_matching_point():
    prob = problems.jump_gamma()
    lam = 2.0 + 0.3j
    vals = [delta(prob, lam, x_star=x) for x in (0.25, 0.5, 0.85)]
    for v in vals[1:]:
        assert abs(v - vals[0]) < 1e-8


def test_delta_matches_oracle():
    for name in ("jump-plain", "jump-gamma", "jump-gamma-q", "jump-q1"):
        prob = problems.get(name)
        qv = region_q_values(prob)
        for lam in (0.7, 2.5, 5.0, 0.3 + 1.1j):
            mine = delta(prob, lam)
            ref = oracle_delta(prob.density, prob.jumps, lam, qv)
            assert abs(mine - ref) < 1e-8 * max(1.0, abs(ref))


def test_delta_rejects_invalid_problem():
    base = problems.jump_plain()
    bad = PencilProblem(base.p, base.q, DensityProfile(2.0, 3.0, 2.5, 1.0),
                        base.jumps)
    with pytest.raises(ValidationError):
        delta(bad, 1.0)


def test_delta0_trivial_reduces_to_cosine():
    # the model carries its own sign convention: +cos(lam pi) at the
    # identity profile (delta itself tends to -cos); roots coincide
    prob = problems.trivial()
    for lam in (0.0, 0.7, 2.5, 9.0):
        assert abs(delta0(prob, lam) - math.cos(lam * PI)) < 1e-12


def test_delta0_matches_transfer_product_without_q():
    # for p = 0, q = 0 the four-cosine model is exactly the negated
    # characteristic function, giving an independent closed-form check of
    # the transfer product (and vice versa)
    for name in ("jump-plain",):
        prob = problems.get(name)
        for k in range(1, 60):
            lam = 0.37 * k
            d0 = delta0(prob, lam)
            ref = oracle_delta(prob.density, prob.jumps, lam)
            assert abs(d0 + ref) < 1e-12 * max(1.0, abs(ref))


def test_delta0_gamma_terms_change_the_model():
    plain = problems.jump_plain()
    withg = problems.jump_gamma()
    assert abs(delta0(plain, 3.0) - delta0(withg, 3.0)) > 1e-3


def test_delta0_real_only_without_drift():
    assert abs(delta0(problems.jump_gamma(), 4.0).imag) < 1e-14
    assert abs(delta0(problems.drift(), 4.0).imag) > 1e-6


def test_delta_minus_delta0_stays_bounded():
    # the difference is O(1) bounded while both factors keep oscillating
    prob = problems.jump_gamma()
    for lam in (10.0, 20.0, 40.0, 80.0):
        gap = abs(delta(prob, lam) - delta0(prob, lam))
        assert gap < 2.5


def test_scan_characteristic_pairs_delta_with_model():
    prob = problems.jump_plain()
    grid = [0.5, 1.0, 1.5]
    samples = scan_characteristic(prob, grid)
    assert [s.lam for s in samples] == [complex(g) for g in grid]
    for s in samples:
        assert abs(s.delta - delta(prob, s.lam)) < 1e-8
        assert abs(s.delta0 - delta0(prob, s.lam)) < 1e-14


def test_find_eigenvalues_trivial():
    prob = problems.trivial()
    recs = find_eigenvalues(prob, 10.0)
    assert [r.n for r in recs] == list(range(len(recs)))
    assert len(recs) == 10
    for r in recs:
        assert abs(r.lambda_n - (r.n + 0.5)) < 1e-8
        # closed forms: alpha_n = pi/2, beta_n = -(-1)^n / lambda_n
        assert abs(r.alpha_n - PI / 2) < 1e-8
        want_beta = -((-1.0) ** r.n) / r.lambda_n
        assert abs(r.beta_n - want_beta) < 1e-8
        assert r.lambda_n0 == pytest.approx(r.n, rel=1e-15, abs=1e-15)
        assert r.residual == pytest.approx(0.5, abs=1e-8)
        assert r.im_residual < 1e-12


def test_find_eigenvalues_bad_range():
    with pytest.raises(ValueError):
        find_eigenvalues(problems.trivial(), 1.0, lambda_min=2.0)


def test_normalized_alpha_trivial_value():
    assert abs(normalized_alpha(problems.trivial(), 0.5) - PI / 2) < 1e-9


def test_eigenvalue_count_tracks_optical_length():
    prob = problems.jump_plain()
    recs = find_eigenvalues(prob, 40.0, compute_extras=False)
    expected = prob.density.optical_length * 40.0 / PI
    assert abs(len(recs) - expected) <= 3.0


def test_asymptotic_residual_bounded():
    prob = problems.jump_plain()
    recs = find_eigenvalues(prob, 40.0, compute_extras=False)
    assert len(recs) >= 41
    assert max(abs(r.residual) for r in recs) < 0.5


def test_lemma4_trivial_hand_values():
    # Delta = -cos(lam pi) gives Delta'(l_0) = pi sin(pi/2) = pi at l_0 = 1/2
    recs = find_eigenvalues(problems.trivial(), 3.0)
    r0 = recs[0]
    assert abs(r0.ddelta - PI) < 1e-6
    chk = check_lemma4(r0)
    assert abs(chk["rhs"] - (-2.0 * 0.5 * (-2.0) * PI / 2)) < 1e-6
    assert chk["relative_error"] < 1e-6


def test_lemma4_identity_on_real_spectra():
    for name in ("jump-plain", "jump-q1", "drift"):
        recs = find_eigenvalues(problems.get(name), 8.0)
        for r in recs:
            assert check_lemma4(r)["relative_error"] < 1e-5


def test_lemma4_convergence_with_tolerance():
    from qpencil.propagator import StepControl

    prob = problems.jump_q1()
    loose = find_eigenvalues(prob, 3.0,
                             step_control=StepControl(atol=1e-7, rtol=1e-7))
    tight = find_eigenvalues(prob, 3.0)
    err_loose = max(check_lemma4(r)["relative_error"] for r in loose)
    err_tight = max(check_lemma4(r)["relative_error"] for r in tight)
    assert err_tight < 1e-5
    assert err_tight <= err_loose * 10  # tightening never badly degrades


def test_orthogonality_trivial_pairs():
    prob = problems.trivial()
    recs = find_eigenvalues(prob, 9.0)
    for i in range(5):
        for k in range(i + 1, 5):
            assert check_orthogonality(prob, recs[i], recs[k]) < 1e-8


def test_orthogonality_diagonal_is_normalizer():
    prob = problems.jump_plain()
    recs = find_eigenvalues(prob, 4.0)
    r = recs[1]
    diag = check_orthogonality(prob, r, r)
    assert abs(diag - 2.0 * r.lambda_n * r.alpha_n) < 1e-7 * abs(diag)


def test_orthogonality_jump_pairs():
    for name in ("jump-plain", "drift"):
        prob = problems.get(name)
        recs = find_eigenvalues(prob, 10.0)
        for i in range(min(6, len(recs))):
            for k in range(i + 1, min(6, len(recs))):
                assert check_orthogonality(prob, recs[i], recs[k]) < 1e-6


def test_gamma_fixture_flags_imaginary_residual():
    # with gamma terms on, the determinant is complex on the real axis and
    # located roots keep a visible |Im Delta|; the solver says so
    with pytest.warns(UserWarning, match="realness"):
        recs = find_eigenvalues(problems.jump_gamma(), 6.0)
    assert max(r.im_residual for r in recs) > 1e-6
    # the derivative identity degrades to the size of that residual; it is
    # a real-spectrum identity, not a numerics failure
    errs = [check_lemma4(r)["relative_error"] for r in recs]
    assert max(errs) > 1e-4


def test_model_roots_match_spectrum_without_q():
    # q = 0: the model is exact, so its roots are the eigenvalues
    prob = problems.commensurate()
    ev = find_eigenvalues(prob, 15.0, compute_extras=False)
    mr = delta0_roots(prob, 15.0)
    m = min(len(ev), len(mr))
    assert m >= 25
    for i in range(m):
        assert abs(ev[i].lambda_n - mr[i]) < 1e-8


def test_delta0_roots_reject_drift():
    with pytest.raises(NumericalError):
        delta0_roots(problems.drift(), 10.0)


def test_asymptotic_table_trivial():
    rows = asymptotic_table(problems.trivial(), 8)
    assert len(rows) == 9
    for row in rows:
        assert row.gap == pytest.approx(0.5, abs=1e-8)
        # model roots coincide with the spectrum here
        assert abs(row.model_gap) < 1e-8
        assert abs(row.model_product) < 1e-6


def test_asymptotic_table_requires_reasonable_n():
    with pytest.raises(ValueError):
        asymptotic_table(problems.trivial(), 4)


def test_asymptotic_table_drift_skips_model_columns():
    rows = asymptotic_table(problems.drift(), 6)
    assert len(rows) == 7
    assert all(math.isnan(row.model_root) for row in rows)
    assert max(abs(row.gap) for row in rows) < 1.0
