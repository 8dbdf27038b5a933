# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled adaptive Runge-Kutta kernel (Dormand-Prince 5(4), FSAL).

Twin of _rk_py.integrate_span: same algorithm, same operation order, same
status codes. Runs without the GIL so PENCIL_THREADS parallelism scales.
"""

from libc.math cimport sqrt, pow, fabs

cdef double C2 = 1.0 / 5.0
cdef double C3 = 3.0 / 10.0
cdef double C4 = 4.0 / 5.0
cdef double C5 = 8.0 / 9.0
cdef double A21 = 1.0 / 5.0
cdef double A31 = 3.0 / 40.0
cdef double A32 = 9.0 / 40.0
cdef double A41 = 44.0 / 45.0
cdef double A42 = -56.0 / 15.0
cdef double A43 = 32.0 / 9.0
cdef double A51 = 19372.0 / 6561.0
cdef double A52 = -25360.0 / 2187.0
cdef double A53 = 64448.0 / 6561.0
cdef double A54 = -212.0 / 729.0
cdef double A61 = 9017.0 / 3168.0
cdef double A62 = -355.0 / 33.0
cdef double A63 = 46732.0 / 5247.0
cdef double A64 = 49.0 / 176.0
cdef double A65 = -5103.0 / 18656.0
cdef double B1 = 35.0 / 384.0
cdef double B3 = 500.0 / 1113.0
cdef double B4 = 125.0 / 192.0
cdef double B5 = -2187.0 / 6784.0
cdef double B6 = 11.0 / 84.0
cdef double E1 = 71.0 / 57600.0
cdef double E3 = -71.0 / 16695.0
cdef double E4 = 71.0 / 1920.0
cdef double E5 = -17253.0 / 339200.0
cdef double E6 = 22.0 / 525.0
cdef double E7 = -1.0 / 40.0

cdef long MAX_STEPS = 10000000

KERNEL_NAME = "compiled"


cdef inline double complex wval(double complex lam2eta, double complex two_lam,
                                double[::1] p_coef, Py_ssize_t np_,
                                double[::1] q_coef, Py_ssize_t nq,
                                double t) nogil:
    cdef double pv = 0.0
    cdef double qv = 0.0
    cdef Py_ssize_t j
    for j in range(np_ - 1, -1, -1):
        pv = pv * t + p_coef[j]
    for j in range(nq - 1, -1, -1):
        qv = qv * t + q_coef[j]
    return two_lam * pv + qv - lam2eta


def integrate_span(double complex lam, double eta,
                   double[::1] p_coef, double[::1] q_coef,
                   double x_ref, double x0, double x1,
                   double complex y, double complex yp,
                   double atol, double rtol, double max_step,
                   long fixed_steps, double guard):
    """Propagate (y, y') from x0 to x1; returns (y, yp, status, nsteps)."""
    cdef double span = x1 - x0
    if span == 0.0:
        return y, yp, 0, 0
    cdef double direction = 1.0 if span > 0.0 else -1.0
    cdef double complex lam2eta = lam * lam * eta
    cdef double complex two_lam = 2.0 * lam
    cdef Py_ssize_t ncp = p_coef.shape[0]
    cdef Py_ssize_t ncq = q_coef.shape[0]

    cdef double x = x0
    cdef long nsteps = 0
    cdef int status = 0
    cdef bint last = False
    cdef long i
    cdef double h, hmax, hnew, hfloor, fac, err, sy, sp, ry, rp, ay_, an_
    cdef double complex w, ay, ap, ny, npr
    cdef double complex k1y, k1p, k2y, k2p, k3y, k3p, k4y, k4p
    cdef double complex k5y, k5p, k6y, k6p, k7y, k7p

    w = wval(lam2eta, two_lam, p_coef, ncp, q_coef, ncq, x - x_ref)
    k1y = yp
    k1p = w * y

    if fixed_steps > 0:
        with nogil:
            h = span / fixed_steps
            for i in range(fixed_steps):
                ay = y + h * (A21 * k1y)
                ap = yp + h * (A21 * k1p)
                w = wval(lam2eta, two_lam, p_coef, ncp, q_coef, ncq, x + C2 * h - x_ref)
                k2y = ap
                k2p = w * ay
                ay = y + h * (A31 * k1y + A32 * k2y)
                ap = yp + h * (A31 * k1p + A32 * k2p)
                w = wval(lam2eta, two_lam, p_coef, ncp, q_coef, ncq, x + C3 * h - x_ref)
                k3y = ap
                k3p = w * ay
                ay = y + h * (A41 * k1y + A42 * k2y + A43 * k3y)
                ap = yp + h * (A41 * k1p + A42 * k2p + A43 * k3p)
                w = wval(lam2eta, two_lam, p_coef, ncp, q_coef, ncq, x + C4 * h - x_ref)
                k4y = ap
                k4p = w * ay
                ay = y + h * (A51 * k1y + A52 * k2y + A53 * k3y + A54 * k4y)
                ap = yp + h * (A51 * k1p + A52 * k2p + A53 * k3p + A54 * k4p)
                w = wval(lam2eta, two_lam, p_coef, ncp, q_coef, ncq, x + C5 * h - x_ref)
                k5y = ap
                k5p = w * ay
                ay = y + h * (A61 * k1y + A62 * k2y + A63 * k3y + A64 * k4y + A65 * k5y)
                ap = yp + h * (A61 * k1p + A62 * k2p + A63 * k3p + A64 * k4p + A65 * k5p)
                w = wval(lam2eta, two_lam, p_coef, ncp, q_coef, ncq, x + h - x_ref)
                k6y = ap
                k6p = w * ay
                y = y + h * (B1 * k1y + B3 * k3y + B4 * k4y + B5 * k5y + B6 * k6y)
                yp = yp + h * (B1 * k1p + B3 * k3p + B4 * k4p + B5 * k5p + B6 * k6p)
                x = x0 + (i + 1) * h
                w = wval(lam2eta, two_lam, p_coef, ncp, q_coef, ncq, x - x_ref)
                k1y = yp
                k1p = w * y
                nsteps += 1
                if not (abs(y) <= guard and abs(yp) <= guard):
                    status = 1
                    break
        return y, yp, status, nsteps

    hmax = fabs(span)
    if max_step < hmax:
        hmax = max_step
    h = direction * hmax
    hfloor = 1e-13 * max(1.0, fabs(span))

    with nogil:
        while True:
            last = False
            if direction * (x + h - x1) >= 0.0:
                h = x1 - x
                last = True

            ay = y + h * (A21 * k1y)
            ap = yp + h * (A21 * k1p)
            w = wval(lam2eta, two_lam, p_coef, ncp, q_coef, ncq, x + C2 * h - x_ref)
            k2y = ap
            k2p = w * ay
            ay = y + h * (A31 * k1y + A32 * k2y)
            ap = yp + h * (A31 * k1p + A32 * k2p)
            w = wval(lam2eta, two_lam, p_coef, ncp, q_coef, ncq, x + C3 * h - x_ref)
            k3y = ap
            k3p = w * ay
            ay = y + h * (A41 * k1y + A42 * k2y + A43 * k3y)
            ap = yp + h * (A41 * k1p + A42 * k2p + A43 * k3p)
            w = wval(lam2eta, two_lam, p_coef, ncp, q_coef, ncq, x + C4 * h - x_ref)
            k4y = ap
            k4p = w * ay
            ay = y + h * (A51 * k1y + A52 * k2y + A53 * k3y + A54 * k4y)
            ap = yp + h * (A51 * k1p + A52 * k2p + A53 * k3p + A54 * k4p)
            w = wval(lam2eta, two_lam, p_coef, ncp, q_coef, ncq, x + C5 * h - x_ref)
            k5y = ap
            k5p = w * ay
            ay = y + h * (A61 * k1y + A62 * k2y + A63 * k3y + A64 * k4y + A65 * k5y)
            ap = yp + h * (A61 * k1p + A62 * k2p + A63 * k3p + A64 * k4p + A65 * k5p)
            w = wval(lam2eta, two_lam, p_coef, ncp, q_coef, ncq, x + h - x_ref)
            k6y = ap
            k6p = w * ay

            ny = y + h * (B1 * k1y + B3 * k3y + B4 * k4y + B5 * k5y + B6 * k6y)
            npr = yp + h * (B1 * k1p + B3 * k3p + B4 * k4p + B5 * k5p + B6 * k6p)
            w = wval(lam2eta, two_lam, p_coef, ncp, q_coef, ncq, x + h - x_ref)
            k7y = npr
            k7p = w * ny

            ay = h * (E1 * k1y + E3 * k3y + E4 * k4y + E5 * k5y + E6 * k6y + E7 * k7y)
            ap = h * (E1 * k1p + E3 * k3p + E4 * k4p + E5 * k5p + E6 * k6p + E7 * k7p)
            ay_ = abs(y)
            an_ = abs(ny)
            sy = atol + rtol * (ay_ if ay_ > an_ else an_)
            ay_ = abs(yp)
            an_ = abs(npr)
            sp = atol + rtol * (ay_ if ay_ > an_ else an_)
            ry = abs(ay) / sy
            rp = abs(ap) / sp
            err = sqrt(0.5 * (ry * ry + rp * rp))
            if err != err:
                y = ny
                yp = npr
                nsteps += 1
                status = 1
                break

            if err <= 1.0:
                x = x1 if last else x + h
                y = ny
                yp = npr
                k1y = k7y
                k1p = k7p
                nsteps += 1
                if not (abs(y) <= guard and abs(yp) <= guard):
                    status = 1
                    break
                if last:
                    break
                fac = 0.9 * pow(err, -0.2) if err > 0.0 else 5.0
                if fac > 5.0:
                    fac = 5.0
            else:
                fac = 0.9 * pow(err, -0.2)
                if fac < 0.2:
                    fac = 0.2
                if fac > 1.0:
                    fac = 1.0
            hnew = fabs(h) * fac
            if hnew > hmax:
                hnew = hmax
            if hnew < hfloor or nsteps >= MAX_STEPS:
                status = 2
                break
            h = direction * hnew

    return y, yp, status, nsteps
