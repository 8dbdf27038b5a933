"""Weyl solution and Weyl function, with pole-aware grid sampling.

The Weyl function is M(lam) = -psi(0, lam) / Delta(lam); it is meromorphic
with simple poles at the eigenvalues. The Weyl solution Phi = -psi/Delta
satisfies Phi'(0) = 1 and Phi(pi) = 0 and decomposes as Phi = S + M*phi.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import AtPoleError, EmptyGridError, ValidationError
from .model import validate
from .propagator import (
    DEFAULT_CONTROL,
    SolutionTrace,
    TraceEntry,
    psi_endpoints,
    solve_psi,
)
from .spectral import _delta_fast
from .util import pmap


@dataclass(frozen=True)
class WeylSample:
    """One Weyl-function evaluation with its distance to the known poles."""

    lam: complex
    m: complex
    pole_distance: float


def _pole_estimate(problem, lam, dlt, control):
    # one Newton step from lam toward the root of Delta
    h = 1e-5 * max(1.0, abs(lam))
    dd = (_delta_fast(problem, lam + h, control)
          - _delta_fast(problem, lam - h, control)) / (2.0 * h)
    return lam - dlt / dd if dd != 0.0 else lam


def weyl_function(problem, lam, step_control=None) -> complex:
    """M(lam) = -psi(0, lam) / Delta(lam).

    One backward solve provides both pieces: Delta = -psi'(0) exactly
    (phi(0)=1, phi'(0)=0), so M = psi(0)/psi'(0). Raises AtPoleError with a
    Newton estimate of the offending eigenvalue when |Delta| falls under
    the degeneracy floor 1e-12 * max(1, |psi(0)|).
    """
    violations = validate(problem, allow_identity=True)
    if violations:
        raise ValidationError(violations)
    control = step_control or DEFAULT_CONTROL
    lam = complex(lam)
    psi0, psi0p = psi_endpoints(problem, lam, control)
    dlt = -psi0p
    if abs(dlt) <= 1e-12 * max(1.0, abs(psi0)):
        raise AtPoleError(lam, _pole_estimate(problem, lam, dlt, control))
    return -psi0 / dlt


def weyl_solution(problem, lam, mesh_hint=None, step_control=None) -> SolutionTrace:
    """Trace of the Weyl solution Phi = -psi / Delta.

    Scales one psi trace, so the endpoint contracts Phi'(0) = 1 and
    Phi(pi) = 0 are exact up to solver tolerance, and Phi(0) = M(lam).
    """
    violations = validate(problem, allow_identity=True)
    if violations:
        raise ValidationError(violations)
    control = step_control or DEFAULT_CONTROL
    lam = complex(lam)
    trace = solve_psi(problem, lam, mesh_hint, control)
    first = trace.entries[0]
    if first.x != 0.0:
        raise AssertionError("psi trace does not start at x=0")
    dlt = -first.yprime
    if abs(dlt) <= 1e-12 * max(1.0, abs(first.y)):
        raise AtPoleError(lam, _pole_estimate(problem, lam, dlt, control))
    scale = -1.0 / dlt
    entries = tuple(
        TraceEntry(e.x, e.y * scale, e.yprime * scale, e.region, e.side)
        for e in trace.entries)
    return SolutionTrace(lam=trace.lam, entries=entries)


def sample_weyl_grid(problem, grid, eigenvalues, exclusion=0.05,
                     step_control=None):
    """Evaluate M over a grid, dropping points too close to known poles.

    eigenvalues may be EigenRecords or bare numbers; pole_distance is the
    distance to the nearest one (inf when the list is empty, e.g. for
    off-axis grids that need no exclusion). Points within `exclusion` of a
    pole are dropped; an entirely excluded grid raises EmptyGridError.
    """
    poles = [complex(getattr(e, "lambda_n", e)) for e in eigenvalues]
    kept = []
    for g in grid:
        gc = complex(g)
        dist = min((abs(gc - p) for p in poles), default=float("inf"))
        if dist > exclusion:
            kept.append((gc, dist))
    if not kept:
        raise EmptyGridError("empty grid after exclusion")

    def one(item):
        gc, dist = item
        return WeylSample(lam=gc, m=weyl_function(problem, gc, step_control),
                          pole_distance=dist)

    return pmap(one, kept)


def default_offaxis_grid(count=16, re_lo=0.5, re_hi=8.0, im=0.2):
    """Canonical off-axis sampling grid for uniqueness experiments.

    A horizontal line Im lam = im avoids every real pole without needing
    the spectrum first.
    """
    if count < 2:
        raise ValueError("grid needs at least 2 points")
    step = (re_hi - re_lo) / (count - 1)
    return [complex(re_lo + k * step, im) for k in range(count)]
