"""Built-in example problems shared by the tests and the self-check suite.

The jump family keeps one geometry (steps at x=1 and x=2, density steps
alpha=2, beta=3, jump scales 1.5 and 0.8) and varies the analytically
awkward parts: gamma terms on/off, q on/off, drift on/off. The
commensurate pair puts the breakpoints at pi/3 and 2pi/3 so the optical
length is exactly 2*pi, which makes asymptotic offsets easy to read.
"""
from __future__ import annotations

from .model import (
    PI,
    CoefficientFunction,
    DensityProfile,
    JumpParameters,
    PencilProblem,
)

_ZERO = CoefficientFunction.zero()


def trivial() -> PencilProblem:
    """Constant density 1, no jumps, p = q = 0: the closed-form case.

    Delta(lam) = -cos(lam*pi), eigenvalues n + 1/2, alpha_n = pi/2. Fails
    strict validation on purpose (identity jumps); validate with
    allow_identity when needed.
    """
    return PencilProblem(p=_ZERO, q=_ZERO,
                         density=DensityProfile(1.0, 1.0, 1.0, 2.0),
                         jumps=JumpParameters(1.0, 0.0, 1.0, 0.0))


def jump_plain() -> PencilProblem:
    """Two density steps and two real jumps; p = q = 0, gammas off."""
    return PencilProblem(p=_ZERO, q=_ZERO,
                         density=DensityProfile(2.0, 3.0, 1.0, 2.0),
                         jumps=JumpParameters(1.5, 0.0, 0.8, 0.0))


def jump_gamma() -> PencilProblem:
    """jump_plain with spectral-parameter-dependent jump terms switched on."""
    return PencilProblem(p=_ZERO, q=_ZERO,
                         density=DensityProfile(2.0, 3.0, 1.0, 2.0),
                         jumps=JumpParameters(1.5, 0.2, 0.8, -0.1))


def jump_gamma_q() -> PencilProblem:
    """jump_gamma plus a region-wise constant potential."""
    q = CoefficientFunction("piecewise-constant", (1.0, 2.0),
                            (0.5, -0.3, 1.0))
    return PencilProblem(p=_ZERO, q=q,
                         density=DensityProfile(2.0, 3.0, 1.0, 2.0),
                         jumps=JumpParameters(1.5, 0.2, 0.8, -0.1))


def jump_q1() -> PencilProblem:
    """jump_plain with q = 1 everywhere (real spectrum, shifted)."""
    return PencilProblem(p=_ZERO, q=CoefficientFunction.constant(1.0),
                         density=DensityProfile(2.0, 3.0, 1.0, 2.0),
                         jumps=JumpParameters(1.5, 0.0, 0.8, 0.0))


def drift() -> PencilProblem:
    """Nonzero p (region-wise constant) with a constant q; gammas off."""
    p = CoefficientFunction("piecewise-constant", (1.0, 2.0),
                            (0.3, -0.2, 0.1))
    return PencilProblem(p=p, q=CoefficientFunction.constant(0.4),
                         density=DensityProfile(2.0, 3.0, 1.0, 2.0),
                         jumps=JumpParameters(1.5, 0.0, 0.8, 0.0))


def commensurate(q_level: float = 0.0) -> PencilProblem:
    """Steps at pi/3 and 2pi/3: optical length exactly 2*pi.

    Mean eigenvalue spacing is then pi/D = 1/2, handy for asymptotic
    offset studies at q_level 0 (model roots exact) and 1 (shifted).
    """
    q = CoefficientFunction.constant(q_level) if q_level else _ZERO
    return PencilProblem(p=_ZERO, q=q,
                         density=DensityProfile(2.0, 3.0, PI / 3, 2 * PI / 3),
                         jumps=JumpParameters(1.5, 0.0, 0.8, 0.0))


REGISTRY = {
    "trivial": trivial,
    "jump-plain": jump_plain,
    "jump-gamma": jump_gamma,
    "jump-gamma-q": jump_gamma_q,
    "jump-q1": jump_q1,
    "drift": drift,
}


def get(name: str) -> PencilProblem:
    try:
        return REGISTRY[name]()
    except KeyError:
        raise KeyError(f"unknown example problem {name!r}; "
                       f"choices: {sorted(REGISTRY)}") from None
