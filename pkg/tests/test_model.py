"""Problem description layer: coefficients, density, jumps, validation, JSON."""

import math
import random

import pytest

from qpencil import problems
from qpencil.errors import SchemaError
from qpencil.model import (
    PI,
    CoefficientFunction,
    DensityProfile,
    JumpParameters,
    PencilProblem,
    evaluate_delta,
    piecewise_eval,
    positivity_screen,
    problem_from_dict,
    problem_to_dict,
    validate,
)


def test_constant_coefficient():
    c = CoefficientFunction.constant(2.5)
    for x in (0.0, 1.7, PI):
        assert c.evaluate(x) == pytest.approx(2.5, abs=1e-15)
    assert c.integrate(0.0, PI) == pytest.approx(2.5 * PI, rel=1e-15)
    assert not c.is_zero
    assert CoefficientFunction.zero().is_zero


def test_piecewise_constant_right_continuous():
    c = CoefficientFunction("piecewise-constant", (1.0, 2.0), (1.0, 2.0, 3.0))
    assert c.evaluate(0.5) == 1.0
    assert c.evaluate(1.0) == 2.0  # right-continuous at a breakpoint
    assert c.evaluate(1.0 - 1e-12) == 1.0
    assert c.evaluate(2.0) == 3.0
    assert c.evaluate(PI) == 3.0
    # integral adds up piece by piece
    assert c.integrate(0.0, PI) == pytest.approx(1.0 + 2.0 + 3.0 * (PI - 2.0), rel=1e-14)
    assert c.integrate(0.5, 1.5) == pytest.approx(0.5 + 1.0, rel=1e-14)


def test_piecewise_polynomial_local_coordinates():
    # f(x) = 1 + x on [0, 1), 0 beyond (local coordinate is x - piece start)
    c = CoefficientFunction("piecewise-polynomial", (1.0,), ((1.0, 1.0), (0.0,)))
    assert c.evaluate(0.5) == pytest.approx(1.5, rel=1e-15)
    assert c.evaluate(2.0) == 0.0
    assert c.integrate(0.0, 1.0) == pytest.approx(1.5, rel=1e-14)
    assert c.integrate(0.5, 2.0) == pytest.approx(0.875, rel=1e-14)
    # antisymmetric orientation
    assert c.integrate(1.0, 0.0) == pytest.approx(-1.5, rel=1e-14)


def test_grid_sampled_linear_interpolation():
    c = CoefficientFunction("grid-sampled", (), (0.0, 1.0, 0.0))
    assert c.evaluate(PI / 4) == pytest.approx(0.5, rel=1e-14)
    assert c.evaluate(PI / 2) == pytest.approx(1.0, rel=1e-14)
    # exact for a piecewise-linear integrand
    assert c.integrate(0.0, PI) == pytest.approx(PI / 2, rel=1e-14)


def test_coefficient_shape_errors():
    with pytest.raises(ValueError):
        CoefficientFunction("piecewise-constant", (1.0,), (1.0,))  # needs 2 pieces
    with pytest.raises(ValueError):
        CoefficientFunction("grid-sampled", (1.0,), (0.0, 1.0))
    with pytest.raises(ValueError):
        CoefficientFunction("grid-sampled", (), (0.0,))
    with pytest.raises(ValueError):
        CoefficientFunction("spline", (), (0.0,))
    with pytest.raises(ValueError):
        CoefficientFunction("piecewise-polynomial", (1.0,), ((1.0,), ()))


def test_piecewise_eval_matches_scalar_loop():
    import numpy as np

    c = CoefficientFunction("piecewise-polynomial", (1.2, 2.1),
                            ((0.5, 1.0), (2.0,), (0.0, 0.0, 1.0)))
    breaks, coefs = c.piece_arrays()
    rng = random.Random(7)
    xs = np.array(sorted(rng.uniform(0.0, PI) for _ in range(40)))
    vec = piecewise_eval(breaks, coefs, xs)
    for xv, fv in zip(xs, vec):
        assert fv == pytest.approx(c.evaluate(float(xv)), rel=1e-13, abs=1e-13)


def test_density_regions_and_optical_length():
    d = problems.jump_plain().density
    assert [r[2] for r in d.regions()] == [1.0, 4.0, 9.0]
    assert d.optical_length == pytest.approx(1.0 + 2.0 + 3.0 * (PI - 2.0), rel=1e-15)
    # optical length is the integral of sqrt(density) for any valid profile
    rng = random.Random(3)
    for _ in range(10):
        p1 = rng.uniform(0.2, 1.4)
        p2 = rng.uniform(p1 + 0.2, PI - 0.2)
        alpha = rng.uniform(0.3, 3.0)
        beta = rng.uniform(0.3, 3.0)
        d = DensityProfile(alpha, beta, p1, p2)
        direct = sum((b - a) * math.sqrt(eta) for a, b, eta in d.regions())
        assert d.optical_length == pytest.approx(direct, rel=1e-12)


def test_density_rejects_jump_point_queries():
    prob = problems.jump_plain()
    d = prob.density
    with pytest.raises(ValueError):
        d.region_index(d.p1)
    with pytest.raises(ValueError):
        evaluate_delta(prob, d.p2)
    with pytest.raises(ValueError):
        evaluate_delta(prob, -0.1)
    assert d.region_index(0.5) == 0
    assert d.region_index(1.5) == 1
    assert d.region_index(3.0) == 2
    assert evaluate_delta(prob, 2.5) == 9.0


def test_jump_betas_are_exact_inverses():
    j = JumpParameters(1.5, 0.2, 0.8, -0.1)
    assert j.beta1 * j.alpha1 == 1.0
    assert j.beta2 * j.alpha2 == 1.0
    assert j.of_index(1) == (1.5, 0.2)
    assert j.of_index(2) == (0.8, -0.1)
    with pytest.raises(ValueError):
        j.of_index(3)


def test_validate_accepts_builtin_fixtures():
    for name in problems.REGISTRY:
        prob = problems.get(name)
        if name == "trivial":
            assert validate(prob) != []
            assert validate(prob, allow_identity=True) == []
        else:
            assert validate(prob) == []


def test_validate_flags_bad_geometry():
    bad = PencilProblem(
        p=CoefficientFunction.zero(),
        q=CoefficientFunction.zero(),
        density=DensityProfile(2.0, 3.0, 2.5, 1.0),
        jumps=JumpParameters(1.5, 0.0, 0.8, 0.0),
    )
    paths = [v.path for v in validate(bad)]
    assert "density" in paths


def test_validate_flags_identity_and_signs():
    base = problems.jump_plain()
    ident_density = PencilProblem(base.p, base.q,
                                  DensityProfile(1.0, 3.0, 1.0, 2.0), base.jumps)
    assert any(v.path == "density.alpha" for v in validate(ident_density))
    assert validate(ident_density, allow_identity=True) == []

    neg = PencilProblem(base.p, base.q,
                        DensityProfile(-2.0, 3.0, 1.0, 2.0), base.jumps)
    assert any("positive" in v.message for v in validate(neg))

    ident_jump = PencilProblem(base.p, base.q, base.density,
                               JumpParameters(1.0, 0.0, 0.8, 0.0))
    assert any(v.path == "jumps.alpha1" for v in validate(ident_jump))
    # a pure gamma jump (alpha_i = 1, gamma_i != 0) is not the identity
    gamma_only = PencilProblem(base.p, base.q, base.density,
                               JumpParameters(1.0, 0.3, 0.8, 0.0))
    assert validate(gamma_only) == []


def test_validate_flags_breakpoints():
    q = CoefficientFunction("piecewise-constant", (4.0,), (1.0, 2.0))
    prob = PencilProblem(CoefficientFunction.zero(), q,
                         DensityProfile(2.0, 3.0, 1.0, 2.0),
                         JumpParameters(1.5, 0.0, 0.8, 0.0))
    assert any(v.path == "q.breakpoints" for v in validate(prob))

    q2 = CoefficientFunction("piecewise-constant", (2.0, 1.0), (1.0, 2.0, 3.0))
    prob2 = PencilProblem(CoefficientFunction.zero(), q2,
                          DensityProfile(2.0, 3.0, 1.0, 2.0),
                          JumpParameters(1.5, 0.0, 0.8, 0.0))
    assert any("increasing" in v.message for v in validate(prob2))


def test_problem_json_round_trip():
    for name in ("jump-gamma-q", "drift"):
        prob = problems.get(name)
        again = problem_from_dict(problem_to_dict(prob))
        assert again == prob


def test_problem_schema_is_strict():
    obj = problem_to_dict(problems.jump_plain())
    obj["extra"] = 1
    with pytest.raises(SchemaError, match="extra"):
        problem_from_dict(obj)

    obj2 = problem_to_dict(problems.jump_plain())
    del obj2["jumps"]
    with pytest.raises(SchemaError, match="jumps"):
        problem_from_dict(obj2)

    obj3 = problem_to_dict(problems.jump_plain())
    del obj3["density"]["p1"]
    with pytest.raises(SchemaError, match="p1"):
        problem_from_dict(obj3)

    obj4 = problem_to_dict(problems.jump_plain())
    obj4["q"]["kind"] = "mystery"
    with pytest.raises(SchemaError):
        problem_from_dict(obj4)


def test_positivity_screen():
    ok = positivity_screen(CoefficientFunction.zero(), 8)
    assert ok.passed
    # the k = 1 trial mode cos(x/2) has Rayleigh quotient exactly 1/4
    assert ok.min_quotient == pytest.approx(0.25, rel=1e-10)

    bad = positivity_screen(CoefficientFunction.constant(-0.5), 8)
    assert not bad.passed
    assert bad.min_quotient == pytest.approx(-0.25, rel=1e-10)

    with pytest.raises(ValueError):
        positivity_screen(CoefficientFunction.zero(), 3)
