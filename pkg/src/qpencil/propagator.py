"""Fundamental solutions by shooting across regions and jumps.

Solutions of  -y'' + [2 lambda p + q] y = lambda^2 delta y  are propagated as
complex (y, y') pairs region by region. Between the density breakpoints the
equation is a smooth linear ODE handled by the adaptive Runge-Kutta kernel;
at p1 and p2 the transmission conditions act as exact 2x2 transfer matrices

    J_i = [[alpha_i, 0], [i lambda gamma_i, 1/alpha_i]],   det J_i = 1,

applied in closed form (and inverted in closed form for backward shooting).
"""
from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from . import kernel
from .errors import SolutionOverflowError, StiffnessError
from .model import PI, JumpParameters, PencilProblem
from .util import fmt, write_csv


@dataclass(frozen=True)
class StepControl:
    """Integrator tuning knobs.

    fixed_steps = 0 selects the adaptive embedded pair; a positive value
    switches to that many uniform fifth-order steps per smooth sub-span
    (no error control), which exists as a fallback and for step studies.
    """

    atol: float = 1e-10
    rtol: float = 1e-10
    max_step_fraction: float = 1.0 / 16.0
    fixed_steps: int = 0
    overflow_guard: float = 1e300


DEFAULT_CONTROL = StepControl()


@dataclass(frozen=True)
class ShootingState:
    x: float
    y: complex
    yprime: complex


@dataclass(frozen=True)
class TraceEntry:
    x: float
    y: complex
    yprime: complex
    region: int
    side: str  # "" inside a region, "pre"/"post" at a jump point


@dataclass(frozen=True)
class SolutionTrace:
    """States along an ascending mesh, with doubled entries at p1, p2.

    Each jump point contributes two adjacent entries: the left-limit state
    (side "pre") and the right-limit state (side "post").
    """

    lam: complex
    entries: tuple

    @property
    def mesh(self):
        return tuple(e.x for e in self.entries)

    def ys(self):
        return np.array([e.y for e in self.entries])

    def yprimes(self):
        return np.array([e.yprime for e in self.entries])

    def state_at_end(self) -> ShootingState:
        e = self.entries[-1]
        return ShootingState(e.x, e.y, e.yprime)

    def state_at_start(self) -> ShootingState:
        e = self.entries[0]
        return ShootingState(e.x, e.y, e.yprime)


def apply_jump(state: ShootingState, which: int, jumps: JumpParameters,
               lam: complex) -> ShootingState:
    """Left-to-right transmission at jump point `which` (1 or 2)."""
    a, g = jumps.of_index(which)
    y = a * state.y
    yp = 1j * lam * g * state.y + state.yprime / a
    return ShootingState(state.x, y, yp)


def apply_jump_inverse(state: ShootingState, which: int, jumps: JumpParameters,
                       lam: complex) -> ShootingState:
    """Right-to-left transmission: the closed-form inverse of apply_jump."""
    a, g = jumps.of_index(which)
    y = state.y / a
    yp = -1j * lam * g * state.y + a * state.yprime
    return ShootingState(state.x, y, yp)


@functools.lru_cache(maxsize=128)
def _lowered(problem: PencilProblem):
    pb, pc = problem.p.piece_arrays()
    qb, qc = problem.q.piece_arrays()
    return (
        np.ascontiguousarray(pb), np.ascontiguousarray(pc),
        np.ascontiguousarray(qb), np.ascontiguousarray(qc),
    )


def _piece_of(breaks, coefs, xmid):
    i = int(np.searchsorted(breaks, xmid, side="right")) - 1
    i = min(max(i, 0), len(coefs) - 1)
    return float(breaks[i]), np.ascontiguousarray(coefs[i])


def _integrate_smooth(problem, lam, eta, region_len, x0, x1, y, yp, control):
    """Drive the kernel across [x0, x1], splitting at coefficient breaks."""
    pb, pc, qb, qc = _lowered(problem)
    lo, hi = (x0, x1) if x0 < x1 else (x1, x0)
    cuts = [b for b in np.concatenate((pb, qb)) if lo < b < hi]
    nodes = [x0] + sorted(set(cuts), reverse=bool(x0 > x1)) + [x1]
    max_step = region_len * control.max_step_fraction
    for a, b in zip(nodes[:-1], nodes[1:]):
        xm = 0.5 * (a + b)
        pxr, pco = _piece_of(pb, pc, xm)
        qxr, qco = _piece_of(qb, qc, xm)
        if pxr != qxr:
            # kernel takes one shared local origin; rebase p onto q's origin
            pco = _rebase_poly(pco, pxr, qxr)
            pxr = qxr
        y, yp, status, _ = kernel.integrate_span(
            lam, eta, pco, qco, pxr, a, b, y, yp,
            control.atol, control.rtol, max_step,
            control.fixed_steps, control.overflow_guard,
        )
        if status == 1:
            raise SolutionOverflowError(
                f"solution overflow near x={fmt(b)} at lambda={lam}"
            )
        if status == 2:
            raise StiffnessError(
                f"stiffness failure near x={fmt(a)} at lambda={lam}"
            )
    return y, yp


def _rebase_poly(coefs, old_ref, new_ref):
    """Re-expand a polynomial in (x - old_ref) around (x - new_ref)."""
    shift = new_ref - old_ref
    out = np.array(coefs, dtype=float)
    n = len(out)
    # Taylor shift by synthetic division (Horner style)
    for i in range(n - 1):
        for j in range(n - 2, i - 1, -1):
            out[j] += shift * out[j + 1]
    return out


def _shoot(problem, lam, y0, yp0, *, backward=False, x_stop=None,
           mesh=(), collect=False, control=None):
    """Propagate an initial state across regions, applying jump transfers.

    Forward runs start at x=0, backward runs at x=pi. `x_stop` ends the run
    early (it must not equal p1 or p2). Returns (entries, final_state) where
    entries is () unless collect is set; entries are in ascending x order.
    """
    control = control or DEFAULT_CONTROL
    d = problem.density
    lam = complex(lam)
    if x_stop is not None:
        if x_stop in (d.p1, d.p2):
            raise ValueError("x_stop must not be a jump point")
        if not 0.0 <= x_stop <= PI:
            raise ValueError("x_stop outside [0, pi]")

    regions = list(d.regions())
    jump_after = {0: 1, 1: 2}  # region index -> jump id at its right edge
    entries = []
    y, yp = complex(y0), complex(yp0)

    if not backward:
        x = 0.0
        if collect:
            entries.append(TraceEntry(x, y, yp, 0, ""))
        for ridx in range(3):
            a, b, eta = regions[ridx]
            stop_here = x_stop is not None and x_stop <= b
            target = x_stop if stop_here else b
            nodes = [m for m in mesh if x < m < target]
            for m in sorted(nodes):
                y, yp = _integrate_smooth(problem, lam, eta, b - a, x, m, y, yp, control)
                x = m
                if collect:
                    entries.append(TraceEntry(x, y, yp, ridx, ""))
            y, yp = _integrate_smooth(problem, lam, eta, b - a, x, target, y, yp, control)
            x = target
            if stop_here:
                break
            if ridx < 2:
                if collect:
                    entries.append(TraceEntry(x, y, yp, ridx, "pre"))
                st = apply_jump(ShootingState(x, y, yp), jump_after[ridx],
                                problem.jumps, lam)
                y, yp = st.y, st.yprime
                if collect:
                    entries.append(TraceEntry(x, y, yp, ridx + 1, "post"))
            elif collect:
                entries.append(TraceEntry(x, y, yp, 2, ""))
        if collect and x_stop is not None and (not entries or entries[-1].x != x):
            entries.append(TraceEntry(x, y, yp, d.region_index(x), ""))
        return tuple(entries), ShootingState(x, y, yp)

    x = PI
    if collect:
        entries.append(TraceEntry(x, y, yp, 2, ""))
    for ridx in (2, 1, 0):
        a, b, eta = regions[ridx]
        stop_here = x_stop is not None and x_stop >= a
        target = x_stop if stop_here else a
        nodes = [m for m in mesh if target < m < x]
        for m in sorted(nodes, reverse=True):
            y, yp = _integrate_smooth(problem, lam, eta, b - a, x, m, y, yp, control)
            x = m
            if collect:
                entries.append(TraceEntry(x, y, yp, ridx, ""))
        y, yp = _integrate_smooth(problem, lam, eta, b - a, x, target, y, yp, control)
        x = target
        if stop_here:
            break
        if ridx > 0:
            if collect:
                entries.append(TraceEntry(x, y, yp, ridx, "post"))
            st = apply_jump_inverse(ShootingState(x, y, yp), ridx,
                                    problem.jumps, lam)
            y, yp = st.y, st.yprime
            if collect:
                entries.append(TraceEntry(x, y, yp, ridx - 1, "pre"))
        elif collect:
            entries.append(TraceEntry(x, y, yp, 0, ""))
    if collect and x_stop is not None and (not entries or entries[-1].x != x):
        entries.append(TraceEntry(x, y, yp, d.region_index(x), ""))
    if collect:
        entries = entries[::-1]
    return tuple(entries), ShootingState(x, y, yp)


def integrate_region(problem, lam, state: ShootingState, x_end: float,
                     direction: str = "auto",
                     step_control: StepControl = None) -> ShootingState:
    """Integrate within one density region (never across a jump).

    The closed interval between state.x and x_end may touch p1/p2 at its
    endpoints but must not contain a jump point in its interior.
    `direction` is "forward", "backward", or "auto"; an explicit direction
    inconsistent with x_end is rejected.
    """
    control = step_control or DEFAULT_CONTROL
    lam = complex(lam)
    lo, hi = min(state.x, x_end), max(state.x, x_end)
    if direction == "forward" and x_end < state.x:
        raise ValueError("direction forward but x_end < state.x")
    if direction == "backward" and x_end > state.x:
        raise ValueError("direction backward but x_end > state.x")
    if direction not in ("auto", "forward", "backward"):
        raise ValueError(f"unknown direction {direction!r}")
    d = problem.density
    for jp in (d.p1, d.p2):
        if lo < jp < hi:
            raise ValueError(
                f"integration interval crosses the jump at x={fmt(jp)}"
            )
    if lo == hi:
        return state
    a, b, eta = d.regions()[d.region_index(0.5 * (lo + hi))]
    y, yp = _integrate_smooth(problem, lam, eta, b - a, state.x, x_end,
                              state.y, state.yprime, control)
    return ShootingState(x_end, y, yp)


def _default_mesh(problem, points_per_region=15):
    nodes = []
    for a, b, _ in problem.density.regions():
        nodes.extend(np.linspace(a, b, points_per_region + 2)[1:-1])
    return nodes


def _resolve_mesh(problem, mesh_hint):
    if mesh_hint is None:
        return _default_mesh(problem)
    if isinstance(mesh_hint, int):
        return _default_mesh(problem, mesh_hint)
    d = problem.density
    return [float(m) for m in mesh_hint
            if 0.0 < m < PI and m != d.p1 and m != d.p2]


def solve_phi(problem, lam, mesh_hint=None, step_control=None) -> SolutionTrace:
    """Left solution: phi(0) = 1, phi'(0) = 0, propagated to pi."""
    entries, _ = _shoot(problem, lam, 1.0, 0.0, mesh=_resolve_mesh(problem, mesh_hint),
                        collect=True, control=step_control)
    return SolutionTrace(lam=complex(lam), entries=entries)


def solve_s(problem, lam, mesh_hint=None, step_control=None) -> SolutionTrace:
    """Normalized left solution: S(0) = 0, S'(0) = 1."""
    entries, _ = _shoot(problem, lam, 0.0, 1.0, mesh=_resolve_mesh(problem, mesh_hint),
                        collect=True, control=step_control)
    return SolutionTrace(lam=complex(lam), entries=entries)


def solve_psi(problem, lam, mesh_hint=None, step_control=None) -> SolutionTrace:
    """Right solution: psi(pi) = 0, psi'(pi) = 1, propagated back to 0."""
    entries, _ = _shoot(problem, lam, 0.0, 1.0, backward=True,
                        mesh=_resolve_mesh(problem, mesh_hint),
                        collect=True, control=step_control)
    return SolutionTrace(lam=complex(lam), entries=entries)


def solve_initial_value(problem, lam, y0, yp0, mesh_hint=None,
                        step_control=None) -> SolutionTrace:
    """Forward solution with arbitrary initial data at x = 0."""
    entries, _ = _shoot(problem, lam, y0, yp0,
                        mesh=_resolve_mesh(problem, mesh_hint),
                        collect=True, control=step_control)
    return SolutionTrace(lam=complex(lam), entries=entries)


def psi_endpoints(problem, lam, step_control=None):
    """(psi(0), psi'(0)) by one lean backward shot (no trace assembly).

    This pair carries both the Weyl numerator and the characteristic
    function: the Wronskian of psi and phi evaluated at x = 0 collapses to
    -psi'(0) because phi(0) = 1, phi'(0) = 0 are exact initial data.
    """
    _, st = _shoot(problem, lam, 0.0, 1.0, backward=True, control=step_control)
    return st.y, st.yprime


def sample_forward(problem, lam, xs, y0=1.0, yp0=0.0, step_control=None):
    """Values (y, y') of a forward solution at strictly interior nodes xs.

    xs must be ascending and avoid p1/p2; used by the quadrature layers.
    """
    mesh = [float(x) for x in xs]
    entries, _ = _shoot(problem, lam, y0, yp0, mesh=mesh, collect=True,
                        control=step_control)
    wanted = set(mesh)
    picked = [e for e in entries if e.side == "" and e.x in wanted]
    ys = np.array([e.y for e in picked])
    yps = np.array([e.yprime for e in picked])
    if len(ys) != len(xs):
        raise ValueError("sampling mesh contained duplicate or edge nodes")
    return ys, yps


def wronskian(u: SolutionTrace, v: SolutionTrace):
    """Pointwise Wronskian u v' - u' v over the shared mesh."""
    if u.mesh != v.mesh:
        raise ValueError("traces have different meshes")
    return u.ys() * v.yprimes() - u.yprimes() * v.ys()


def trace_to_csv(trace: SolutionTrace, path) -> None:
    rows = [
        (e.x, e.y.real, e.y.imag, e.yprime.real, e.yprime.imag,
         e.region, e.side)
        for e in trace.entries
    ]
    write_csv(path, ["x", "re_y", "im_y", "re_yprime", "im_yprime",
                     "region", "side"], rows)
