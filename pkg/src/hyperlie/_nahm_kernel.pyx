# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled integration kernel for Nahm's equations.

Mirrors ``hyperlie._nahm_py`` step for step; see that module for the
interface.
"""
import numpy as np
from libc.math cimport sqrt, fabs, pow, isfinite

DEF N = 9

cdef int REACHED_END = 0
cdef int CONVERGED = 1
cdef int F_EXCEEDED = 2
cdef int UNDERFLOW = 3
cdef int MAX_STEPS = 4
cdef int PHI_NEGATIVE = 5

cdef double A21 = 1.0 / 5.0
cdef double A31 = 3.0 / 40.0, A32 = 9.0 / 40.0
cdef double A41 = 44.0 / 45.0, A42 = -56.0 / 15.0, A43 = 32.0 / 9.0
cdef double A51 = 19372.0 / 6561.0, A52 = -25360.0 / 2187.0
cdef double A53 = 64448.0 / 6561.0, A54 = -212.0 / 729.0
cdef double A61 = 9017.0 / 3168.0, A62 = -355.0 / 33.0, A63 = 46732.0 / 5247.0
cdef double A64 = 49.0 / 176.0, A65 = -5103.0 / 18656.0
cdef double A71 = 35.0 / 384.0, A73 = 500.0 / 1113.0, A74 = 125.0 / 192.0
cdef double A75 = -2187.0 / 6784.0, A76 = 11.0 / 84.0
cdef double E1 = 71.0 / 57600.0, E3 = -71.0 / 16695.0, E4 = 71.0 / 1920.0
cdef double E5 = -17253.0 / 339200.0, E6 = 22.0 / 525.0, E7 = -1.0 / 40.0

cdef double BETA = 0.04
cdef double EXPO1 = 0.2 - 0.04 * 0.75
cdef double SAFE = 0.9
cdef double FACC1 = 5.0
cdef double FACC2 = 0.1


cdef inline void _rhs(const double* y, double* out) noexcept nogil:
    out[0] = y[4] * y[8] - y[5] * y[7]
    out[1] = y[5] * y[6] - y[3] * y[8]
    out[2] = y[3] * y[7] - y[4] * y[6]
    out[3] = y[7] * y[2] - y[8] * y[1]
    out[4] = y[8] * y[0] - y[6] * y[2]
    out[5] = y[6] * y[1] - y[7] * y[0]
    out[6] = y[1] * y[5] - y[2] * y[4]
    out[7] = y[2] * y[3] - y[0] * y[5]
    out[8] = y[0] * y[4] - y[1] * y[3]


cdef inline double _phi(const double* y) noexcept nogil:
    return (y[0] * (y[4] * y[8] - y[5] * y[7]) + y[1] * (y[5] * y[6] - y[3] * y[8])
            + y[2] * (y[3] * y[7] - y[4] * y[6]))


cdef inline double _sq(const double* v) noexcept nogil:
    cdef double s = 0.0
    cdef int i
    for i in range(N):
        s += v[i] * v[i]
    return s


def nahm_rhs(y):
    cdef double yy[N]
    cdef double out[N]
    cdef int i
    for i in range(N):
        yy[i] = y[i]
    _rhs(yy, out)
    return np.array([out[i] for i in range(N)])


cdef class _Recorder:
    cdef public object times
    cdef public object states
    cdef double[::1] tv
    cdef double[:, ::1] sv
    cdef Py_ssize_t n

    def __cinit__(self):
        self.times = np.empty(256)
        self.states = np.empty((256, N))
        self.tv = self.times
        self.sv = self.states
        self.n = 0

    cdef void push(self, double t, const double* y):
        cdef int i
        if self.n == self.tv.shape[0]:
            self.times = np.concatenate([self.times, np.empty(self.n)])
            self.states = np.concatenate([self.states, np.empty((self.n, N))])
            self.tv = self.times
            self.sv = self.states
        self.tv[self.n] = t
        for i in range(N):
            self.sv[self.n, i] = y[i]
        self.n += 1


def dopri5(y0, double t0, double t1, double rtol=1e-10, double atol=1e-12,
           double h0=0.0, long max_steps=100000, double record_every=0.0,
           double f_max=0.0, double eps_crit=0.0, double phi_neg_tol=-1.0):
    """Adaptive Dormand-Prince 5(4) with PI step control (compiled)."""
    cdef double y[N]
    cdef double ynew[N]
    cdef double tmp[N]
    cdef double k1[N]
    cdef double k2[N]
    cdef double k3[N]
    cdef double k4[N]
    cdef double k5[N]
    cdef double k6[N]
    cdef double k7[N]
    cdef double t = t0, h, hs, hnew, err, e, sk, fac, fac11, facold = 1e-4
    cdef double direction = 1.0 if t1 > t0 else -1.0
    cdef double d0, d1, t_rec = t0
    cdef bint last, last_rejected = False, done
    cdef long naccept = 0, nreject = 0
    cdef int status = REACHED_END
    cdef int i
    cdef _Recorder rec = _Recorder()

    for i in range(N):
        y[i] = y0[i]
    _rhs(y, k1)
    if h0 != 0.0:
        h = fabs(h0)
    else:
        d0 = 0.0
        d1 = 0.0
        for i in range(N):
            sk = atol + rtol * fabs(y[i])
            d0 += (y[i] / sk) ** 2
            d1 += (k1[i] / sk) ** 2
        d0 = sqrt(d0 / 9.0)
        d1 = sqrt(d1 / 9.0)
        h = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
        h = min(h, fabs(t1 - t0))
    rec.push(t, y)

    while True:
        if naccept >= max_steps:
            status = MAX_STEPS
            break
        if fabs(h) < 1e-14 * max(fabs(t), 1.0):
            status = UNDERFLOW
            break
        last = False
        if (t + direction * h - t1) * direction >= 0.0:
            h = fabs(t1 - t)
            last = True
        hs = direction * h
        for i in range(N):
            tmp[i] = y[i] + hs * A21 * k1[i]
        _rhs(tmp, k2)
        for i in range(N):
            tmp[i] = y[i] + hs * (A31 * k1[i] + A32 * k2[i])
        _rhs(tmp, k3)
        for i in range(N):
            tmp[i] = y[i] + hs * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i])
        _rhs(tmp, k4)
        for i in range(N):
            tmp[i] = y[i] + hs * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i])
        _rhs(tmp, k5)
        for i in range(N):
            tmp[i] = y[i] + hs * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i]
                                  + A65 * k5[i])
        _rhs(tmp, k6)
        for i in range(N):
            ynew[i] = y[i] + hs * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i]
                                   + A76 * k6[i])
        _rhs(ynew, k7)
        err = 0.0
        for i in range(N):
            e = hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i]
                      + E7 * k7[i])
            sk = atol + rtol * max(fabs(y[i]), fabs(ynew[i]))
            err += (e / sk) ** 2
        err = sqrt(err / 9.0)
        if not isfinite(err):
            h *= 0.1
            last_rejected = True
            nreject += 1
            continue

        fac11 = pow(err, EXPO1)
        if err <= 1.0:
            fac = fac11 / pow(facold, BETA)
            fac = max(FACC2, min(FACC1, fac / SAFE))
            hnew = h / fac
            facold = max(err, 1e-4)
            naccept += 1
            for i in range(N):
                y[i] = ynew[i]
                k1[i] = k7[i]
            t = t1 if last else t + hs
            if last_rejected:
                hnew = min(hnew, h)
            last_rejected = False

            done = last
            if eps_crit > 0.0 and sqrt(_sq(k1)) <= eps_crit:
                status = CONVERGED
                done = True
            elif f_max > 0.0 and _sq(y) > f_max:
                status = F_EXCEEDED
                done = True
            elif phi_neg_tol >= 0.0 and _phi(y) < -phi_neg_tol:
                status = PHI_NEGATIVE
                done = True
            if done or record_every <= 0.0 or fabs(t - t_rec) >= record_every:
                rec.push(t, y)
                t_rec = t
            if done:
                break
            h = hnew
        else:
            h = h / min(FACC1, fac11 / SAFE)
            last_rejected = True
            nreject += 1

    return (rec.times[:rec.n].copy(), rec.states[:rec.n].copy(), status,
            naccept, nreject)


def rk4_fixed(y0, double t0, double t1, long nsteps):
    """Classical fixed-step RK4 (compiled)."""
    cdef double y[N]
    cdef double tmp[N]
    cdef double k1[N]
    cdef double k2[N]
    cdef double k3[N]
    cdef double k4[N]
    cdef double h = (t1 - t0) / nsteps
    cdef long n
    cdef int i
    times = np.empty(nsteps + 1)
    states = np.empty((nsteps + 1, N))
    cdef double[::1] tv = times
    cdef double[:, ::1] sv = states
    for i in range(N):
        y[i] = y0[i]
        sv[0, i] = y[i]
    tv[0] = t0
    for n in range(nsteps):
        _rhs(y, k1)
        for i in range(N):
            tmp[i] = y[i] + 0.5 * h * k1[i]
        _rhs(tmp, k2)
        for i in range(N):
            tmp[i] = y[i] + 0.5 * h * k2[i]
        _rhs(tmp, k3)
        for i in range(N):
            tmp[i] = y[i] + h * k3[i]
        _rhs(tmp, k4)
        for i in range(N):
            y[i] = y[i] + h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i])
            sv[n + 1, i] = y[i]
        tv[n + 1] = t0 + (n + 1) * h
    return times, states
