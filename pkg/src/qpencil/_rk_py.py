"""Pure-Python adaptive Runge-Kutta kernel (Dormand-Prince 5(4), FSAL).

Integrates the complex second-order system

    y'' = w(x) y,    w(x) = 2 lambda p(x) + q(x) - lambda^2 eta,

over one smooth span, where p and q are single polynomials in the local
coordinate (x - x_ref) and eta is the constant density value of the region.
This file is the reference twin of the compiled kernel in _rk_c.pyx; the two
must stay line-for-line equivalent so their results agree to rounding.

Status codes: 0 ok, 1 solution overflow, 2 step underflow / step budget.
"""

# Dormand-Prince tableau
_C2 = 1.0 / 5.0
_C3 = 3.0 / 10.0
_C4 = 4.0 / 5.0
_C5 = 8.0 / 9.0
_A21 = 1.0 / 5.0
_A31 = 3.0 / 40.0
_A32 = 9.0 / 40.0
_A41 = 44.0 / 45.0
_A42 = -56.0 / 15.0
_A43 = 32.0 / 9.0
_A51 = 19372.0 / 6561.0
_A52 = -25360.0 / 2187.0
_A53 = 64448.0 / 6561.0
_A54 = -212.0 / 729.0
_A61 = 9017.0 / 3168.0
_A62 = -355.0 / 33.0
_A63 = 46732.0 / 5247.0
_A64 = 49.0 / 176.0
_A65 = -5103.0 / 18656.0
_B1 = 35.0 / 384.0
_B3 = 500.0 / 1113.0
_B4 = 125.0 / 192.0
_B5 = -2187.0 / 6784.0
_B6 = 11.0 / 84.0
_E1 = 71.0 / 57600.0
_E3 = -71.0 / 16695.0
_E4 = 71.0 / 1920.0
_E5 = -17253.0 / 339200.0
_E6 = 22.0 / 525.0
_E7 = -1.0 / 40.0

_MAX_STEPS = 10_000_000

KERNEL_NAME = "python"


def _wval(lam2eta, two_lam, p_coef, q_coef, t):
    pv = 0.0
    for j in range(len(p_coef) - 1, -1, -1):
        pv = pv * t + p_coef[j]
    qv = 0.0
    for j in range(len(q_coef) - 1, -1, -1):
        qv = qv * t + q_coef[j]
    return two_lam * pv + qv - lam2eta


def integrate_span(lam, eta, p_coef, q_coef, x_ref, x0, x1, y, yp,
                   atol, rtol, max_step, fixed_steps, guard):
    """Propagate (y, y') from x0 to x1; returns (y, yp, status, nsteps)."""
    span = x1 - x0
    if span == 0.0:
        return y, yp, 0, 0
    direction = 1.0 if span > 0.0 else -1.0
    lam2eta = lam * lam * eta
    two_lam = 2.0 * lam
    p_coef = list(p_coef)
    q_coef = list(q_coef)

    x = x0
    nsteps = 0
    w = _wval(lam2eta, two_lam, p_coef, q_coef, x - x_ref)
    k1y = yp
    k1p = w * y

    if fixed_steps > 0:
        h = span / fixed_steps
        for i in range(fixed_steps):
            ay = y + h * (_A21 * k1y)
            ap = yp + h * (_A21 * k1p)
            w = _wval(lam2eta, two_lam, p_coef, q_coef, x + _C2 * h - x_ref)
            k2y = ap
            k2p = w * ay
            ay = y + h * (_A31 * k1y + _A32 * k2y)
            ap = yp + h * (_A31 * k1p + _A32 * k2p)
            w = _wval(lam2eta, two_lam, p_coef, q_coef, x + _C3 * h - x_ref)
            k3y = ap
            k3p = w * ay
            ay = y + h * (_A41 * k1y + _A42 * k2y + _A43 * k3y)
            ap = yp + h * (_A41 * k1p + _A42 * k2p + _A43 * k3p)
            w = _wval(lam2eta, two_lam, p_coef, q_coef, x + _C4 * h - x_ref)
            k4y = ap
            k4p = w * ay
            ay = y + h * (_A51 * k1y + _A52 * k2y + _A53 * k3y + _A54 * k4y)
            ap = yp + h * (_A51 * k1p + _A52 * k2p + _A53 * k3p + _A54 * k4p)
            w = _wval(lam2eta, two_lam, p_coef, q_coef, x + _C5 * h - x_ref)
            k5y = ap
            k5p = w * ay
            ay = y + h * (_A61 * k1y + _A62 * k2y + _A63 * k3y + _A64 * k4y + _A65 * k5y)
            ap = yp + h * (_A61 * k1p + _A62 * k2p + _A63 * k3p + _A64 * k4p + _A65 * k5p)
            w = _wval(lam2eta, two_lam, p_coef, q_coef, x + h - x_ref)
            k6y = ap
            k6p = w * ay
            y = y + h * (_B1 * k1y + _B3 * k3y + _B4 * k4y + _B5 * k5y + _B6 * k6y)
            yp = yp + h * (_B1 * k1p + _B3 * k3p + _B4 * k4p + _B5 * k5p + _B6 * k6p)
            x = x0 + (i + 1) * h
            w = _wval(lam2eta, two_lam, p_coef, q_coef, x - x_ref)
            k1y = yp
            k1p = w * y
            nsteps += 1
            if not (abs(y) <= guard and abs(yp) <= guard):
                return y, yp, 1, nsteps
        return y, yp, 0, nsteps

    hmax = abs(span)
    if max_step < hmax:
        hmax = max_step
    h = direction * hmax
    hfloor = 1e-13 * max(1.0, abs(span))

    while True:
        last = False
        if direction * (x + h - x1) >= 0.0:
            h = x1 - x
            last = True

        ay = y + h * (_A21 * k1y)
        ap = yp + h * (_A21 * k1p)
        w = _wval(lam2eta, two_lam, p_coef, q_coef, x + _C2 * h - x_ref)
        k2y = ap
        k2p = w * ay
        ay = y + h * (_A31 * k1y + _A32 * k2y)
        ap = yp + h * (_A31 * k1p + _A32 * k2p)
        w = _wval(lam2eta, two_lam, p_coef, q_coef, x + _C3 * h - x_ref)
        k3y = ap
        k3p = w * ay
        ay = y + h * (_A41 * k1y + _A42 * k2y + _A43 * k3y)
        ap = yp + h * (_A41 * k1p + _A42 * k2p + _A43 * k3p)
        w = _wval(lam2eta, two_lam, p_coef, q_coef, x + _C4 * h - x_ref)
        k4y = ap
        k4p = w * ay
        ay = y + h * (_A51 * k1y + _A52 * k2y + _A53 * k3y + _A54 * k4y)
        ap = yp + h * (_A51 * k1p + _A52 * k2p + _A53 * k3p + _A54 * k4p)
        w = _wval(lam2eta, two_lam, p_coef, q_coef, x + _C5 * h - x_ref)
        k5y = ap
        k5p = w * ay
        ay = y + h * (_A61 * k1y + _A62 * k2y + _A63 * k3y + _A64 * k4y + _A65 * k5y)
        ap = yp + h * (_A61 * k1p + _A62 * k2p + _A63 * k3p + _A64 * k4p + _A65 * k5p)
        w = _wval(lam2eta, two_lam, p_coef, q_coef, x + h - x_ref)
        k6y = ap
        k6p = w * ay

        ny = y + h * (_B1 * k1y + _B3 * k3y + _B4 * k4y + _B5 * k5y + _B6 * k6y)
        np_ = yp + h * (_B1 * k1p + _B3 * k3p + _B4 * k4p + _B5 * k5p + _B6 * k6p)
        w = _wval(lam2eta, two_lam, p_coef, q_coef, x + h - x_ref)
        k7y = np_
        k7p = w * ny

        ey = h * (_E1 * k1y + _E3 * k3y + _E4 * k4y + _E5 * k5y + _E6 * k6y + _E7 * k7y)
        ep = h * (_E1 * k1p + _E3 * k3p + _E4 * k4p + _E5 * k5p + _E6 * k6p + _E7 * k7p)
        ay_ = abs(y)
        an_ = abs(ny)
        sy = atol + rtol * (ay_ if ay_ > an_ else an_)
        ay_ = abs(yp)
        an_ = abs(np_)
        sp = atol + rtol * (ay_ if ay_ > an_ else an_)
        ry = abs(ey) / sy
        rp = abs(ep) / sp
        err = (0.5 * (ry * ry + rp * rp)) ** 0.5
        if err != err:
            # NaN propagated from an overflow inside the stages
            return ny, np_, 1, nsteps + 1

        if err <= 1.0:
            x = x1 if last else x + h
            y = ny
            yp = np_
            k1y = k7y
            k1p = k7p
            nsteps += 1
            if not (abs(y) <= guard and abs(yp) <= guard):
                return y, yp, 1, nsteps
            if last:
                return y, yp, 0, nsteps
            fac = 0.9 * err ** -0.2 if err > 0.0 else 5.0
            if fac > 5.0:
                fac = 5.0
        else:
            fac = 0.9 * err ** -0.2
            if fac < 0.2:
                fac = 0.2
            if fac > 1.0:
                fac = 1.0
        hnew = abs(h) * fac
        if hnew > hmax:
            hnew = hmax
        if hnew < hfloor or nsteps >= _MAX_STEPS:
            return y, yp, 2, nsteps
        h = direction * hnew
