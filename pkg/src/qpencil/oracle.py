"""Closed-form transfer-matrix reference for p = 0, piecewise-constant q.

Within a region of constant density eta and constant potential qv the
equation reads y'' = (qv - lambda^2 eta) y, whose fundamental matrix over a
step of width h is exactly

    [[ cos(w h),        sin(w h)/w ],
     [ -w sin(w h),     cos(w h)   ]],      w^2 = lambda^2 eta - qv.

Written in terms of z = (w h)^2 both entries are entire functions of z, so
no branch choice for w is ever needed and the w -> 0 degeneracy reduces to
a series switch. The full interval propagator is the product of the three
region matrices interleaved with the two jump matrices. This module is the
independent reference used to freeze golden values; it never calls the
shooting machinery.
"""
from __future__ import annotations

import cmath

import numpy as np

# |w h| below this switches cos/sinc to their series (cancellation guard)
SERIES_CUTOFF = 1e-4


def _cos_sinc(z):
    """(cos(sqrt z), sin(sqrt z)/sqrt z) as entire functions of complex z."""
    if abs(z) < SERIES_CUTOFF ** 2:
        c = 1.0 - z / 2.0 + z * z / 24.0 - z * z * z / 720.0
        s = 1.0 - z / 6.0 + z * z / 120.0 - z * z * z / 5040.0
        return c, s
    w = cmath.sqrt(z)
    return cmath.cos(w), cmath.sin(w) / w


def region_matrix(eta: float, qv: float, lam: complex, h: float):
    """Fundamental 2x2 matrix across a width-h slab of constant eta, q."""
    omega2 = lam * lam * eta - qv
    z = omega2 * h * h
    c, s = _cos_sinc(z)
    return np.array([[c, h * s], [-omega2 * h * s, c]], dtype=complex)


def jump_matrix(alpha_i: float, gamma_i: float, lam: complex):
    return np.array(
        [[alpha_i, 0.0], [1j * lam * gamma_i, 1.0 / alpha_i]], dtype=complex
    )


def _q_triple(q_values):
    if np.isscalar(q_values):
        return (float(q_values),) * 3
    vals = tuple(float(v) for v in q_values)
    if len(vals) != 3:
        raise ValueError("q_values must be a scalar or one value per region")
    return vals


def region_q_values(problem):
    """Extract the per-region constants of a region-wise constant q.

    Raises if the problem's q steps anywhere other than at p1, p2 (such a
    q has no closed-form propagator here).
    """
    d = problem.density
    allowed = {d.p1, d.p2}
    if problem.q.kind != "piecewise-constant" or not set(problem.q.breakpoints) <= allowed:
        raise ValueError("oracle requires q constant on each density region")
    mids = (0.5 * d.p1, 0.5 * (d.p1 + d.p2), 0.5 * (d.p2 + np.pi))
    return tuple(problem.q.evaluate(m) for m in mids)


def oracle_propagate(density, jumps, lam: complex, q_values=0.0):
    """Total matrix mapping (y, y')(0) to (y, y')(pi).

    Exact (to rounding) for p = 0 with q constant per region; q_values is
    a scalar or a per-region triple.
    """
    lam = complex(lam)
    qv = _q_triple(q_values)
    total = np.eye(2, dtype=complex)
    for i, (a, b, eta) in enumerate(density.regions()):
        total = region_matrix(eta, qv[i], lam, b - a) @ total
        if i < 2:
            total = jump_matrix(*jumps.of_index(i + 1), lam) @ total
    return total


def oracle_delta(density, jumps, lam: complex, q_values=0.0) -> complex:
    """Characteristic function from the total matrix.

    With phi(0) = (1, 0), the Wronskian of the right and left solutions
    evaluated at x = pi collapses to -phi(pi), which is minus the (1,1)
    entry of the total matrix.
    """
    return -oracle_propagate(density, jumps, lam, q_values)[0, 0]


def oracle_weyl(density, jumps, lam: complex, q_values=0.0) -> complex:
    """Weyl function -psi(0)/Delta built from the same total matrix.

    Backward propagation of (0, 1) through the inverse total matrix gives
    psi(0) = -T12 and psi'(0) = T11 (det T = 1), hence M = -T12 / T11.
    """
    total = oracle_propagate(density, jumps, lam, q_values)
    return -total[0, 1] / total[0, 0]
