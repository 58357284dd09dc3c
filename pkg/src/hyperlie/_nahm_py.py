"""Pure-Python integration kernel for Nahm's equations.

Same interface and arithmetic as the compiled ``_nahm_kernel``; it is the
fallback when the extension is not built.  State vectors are flat sequences
``(a1, a2, a3, b1, b2, b3, c1, c2, c3)``.
"""
import math

import numpy as np

REACHED_END = 0
CONVERGED = 1
F_EXCEEDED = 2
UNDERFLOW = 3
MAX_STEPS = 4
PHI_NEGATIVE = 5

# Dormand-Prince 5(4)
C2, C3, C4, C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0
A21 = 1.0 / 5.0
A31, A32 = 3.0 / 40.0, 9.0 / 40.0
A41, A42, A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
A51, A52, A53, A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
A61, A62, A63, A64, A65 = (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0,
                           49.0 / 176.0, -5103.0 / 18656.0)
A71, A73, A74, A75, A76 = (35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0,
                           -2187.0 / 6784.0, 11.0 / 84.0)
E1, E3, E4, E5, E6, E7 = (71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0,
                          -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0)

BETA = 0.04
EXPO1 = 0.2 - BETA * 0.75
SAFE = 0.9
FACC1 = 5.0   # 1 / (smallest step ratio)
FACC2 = 0.1   # 1 / (largest step ratio)


def rhs(y):
    a1, a2, a3, b1, b2, b3, c1, c2, c3 = y
    return [b2 * c3 - b3 * c2, b3 * c1 - b1 * c3, b1 * c2 - b2 * c1,
            c2 * a3 - c3 * a2, c3 * a1 - c1 * a3, c1 * a2 - c2 * a1,
            a2 * b3 - a3 * b2, a3 * b1 - a1 * b3, a1 * b2 - a2 * b1]


def nahm_rhs(y):
    return np.array(rhs([float(v) for v in y]))


def _phi(y):
    a1, a2, a3, b1, b2, b3, c1, c2, c3 = y
    return a1 * (b2 * c3 - b3 * c2) + a2 * (b3 * c1 - b1 * c3) + a3 * (b1 * c2 - b2 * c1)


def _sq(v):
    return sum(x * x for x in v)


def _initial_step(y, f, t0, t1, rtol, atol):
    sk = [atol + rtol * abs(v) for v in y]
    d0 = math.sqrt(sum((v / s) ** 2 for v, s in zip(y, sk)) / 9.0)
    d1 = math.sqrt(sum((v / s) ** 2 for v, s in zip(f, sk)) / 9.0)
    h = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    return min(h, abs(t1 - t0))


def dopri5(y0, t0, t1, rtol=1e-10, atol=1e-12, h0=0.0, max_steps=100000,
           record_every=0.0, f_max=0.0, eps_crit=0.0, phi_neg_tol=-1.0):
    """Adaptive Dormand-Prince 5(4) with PI step control.

    Stops at ``t1`` or earlier when ``|X| <= eps_crit`` (if positive),
    ``F > f_max`` (if positive), ``Phi < -phi_neg_tol`` (if non-negative), the
    step size underflows, or ``max_steps`` accepted steps are taken.

    Returns ``(times, states, status, n_accepted, n_rejected)``.
    """
    y = [float(v) for v in y0]
    t = float(t0)
    direction = 1.0 if t1 > t0 else -1.0
    k1 = rhs(y)
    h = abs(h0) if h0 else _initial_step(y, k1, t0, t1, rtol, atol)
    facold = 1e-4
    last_rejected = False
    times = [t]
    states = [list(y)]
    t_rec = t
    naccept = nreject = 0
    status = REACHED_END

    while True:
        if naccept >= max_steps:
            status = MAX_STEPS
            break
        if abs(h) < 1e-14 * max(abs(t), 1.0):
            status = UNDERFLOW
            break
        last = False
        if (t + direction * h - t1) * direction >= 0.0:
            h = abs(t1 - t)
            last = True
        hs = direction * h
        y2 = [y[i] + hs * A21 * k1[i] for i in range(9)]
        k2 = rhs(y2)
        y3 = [y[i] + hs * (A31 * k1[i] + A32 * k2[i]) for i in range(9)]
        k3 = rhs(y3)
        y4 = [y[i] + hs * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]) for i in range(9)]
        k4 = rhs(y4)
        y5 = [y[i] + hs * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i])
              for i in range(9)]
        k5 = rhs(y5)
        y6 = [y[i] + hs * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i]
                           + A65 * k5[i]) for i in range(9)]
        k6 = rhs(y6)
        ynew = [y[i] + hs * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i]
                             + A76 * k6[i]) for i in range(9)]
        k7 = rhs(ynew)
        err = 0.0
        for i in range(9):
            e = hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i]
                      + E7 * k7[i])
            sk = atol + rtol * max(abs(y[i]), abs(ynew[i]))
            err += (e / sk) ** 2
        err = math.sqrt(err / 9.0)
        if not math.isfinite(err):
            h *= 0.1
            last_rejected = True
            nreject += 1
            continue

        fac11 = err ** EXPO1
        if err <= 1.0:
            fac = fac11 / facold ** BETA
            fac = max(FACC2, min(FACC1, fac / SAFE))
            hnew = h / fac
            facold = max(err, 1e-4)
            naccept += 1
            y = ynew
            k1 = k7
            t = t1 if last else t + hs
            if last_rejected:
                hnew = min(hnew, h)
            last_rejected = False

            done = last
            if eps_crit > 0.0 and math.sqrt(_sq(k1)) <= eps_crit:
                status = CONVERGED
                done = True
            elif f_max > 0.0 and _sq(y) > f_max:
                status = F_EXCEEDED
                done = True
            elif phi_neg_tol >= 0.0 and _phi(y) < -phi_neg_tol:
                status = PHI_NEGATIVE
                done = True
            if done or record_every <= 0.0 or abs(t - t_rec) >= record_every:
                times.append(t)
                states.append(list(y))
                t_rec = t
            if done:
                break
            h = hnew
        else:
            h = h / min(FACC1, fac11 / SAFE)
            last_rejected = True
            nreject += 1

    return np.array(times), np.array(states), status, naccept, nreject


def rk4_fixed(y0, t0, t1, nsteps):
    """Classical fixed-step RK4; the cross-check oracle for :func:`dopri5`."""
    y = [float(v) for v in y0]
    h = (t1 - t0) / nsteps
    times = [float(t0)]
    states = [list(y)]
    for n in range(nsteps):
        k1 = rhs(y)
        k2 = rhs([y[i] + 0.5 * h * k1[i] for i in range(9)])
        k3 = rhs([y[i] + 0.5 * h * k2[i] for i in range(9)])
        k4 = rhs([y[i] + h * k3[i] for i in range(9)])
        y = [y[i] + h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]) for i in range(9)]
        times.append(t0 + (n + 1) * h)
        states.append(list(y))
    return np.array(times), np.array(states)
