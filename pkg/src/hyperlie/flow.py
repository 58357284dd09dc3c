"""Nahm's equations as the gradient flow of Phi.

``a' = [b, c], b' = [c, a], c' = [a, b]``.  Backward-time limits decide
membership of the sets ``S_O`` and ``S_0``; the integrator itself lives in the
compiled kernel (or its pure-Python twin), see :mod:`hyperlie._backend`.
"""
import csv
import math
from dataclasses import dataclass, field

import numpy as np

from . import _backend, poisson
from .errors import PoleReached, StepSizeUnderflow

EPS_CRIT = 1e-8
F_MAX_FACTOR = 1e6
PHI_NEG_TOL = 1e-9
CLASSIFY_T1 = -1e6  # S_0 flows decay like 1/t, so the horizon must be long

CSV_VERSION = "# hyperlie-traj v1"
CSV_HEADER = ["t", "a1", "a2", "a3", "b1", "b2", "b3", "c1", "c2", "c3",
              "phi", "F", "cas1", "cas2", "cas3", "cas4", "cas5", "normX"]

STATUS_NAMES = {0: "reached_end", 1: "converged", 2: "f_exceeded",
                3: "underflow", 4: "max_steps", 5: "phi_negative"}


@dataclass(frozen=True)
class FlowConfig:
    t0: float = 0.0
    t1: float = -20.0
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_steps: int = 200000
    record_every: float = 0.0  # 0 records every accepted step

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("rel_tol and abs_tol must be positive")
        if self.t0 == self.t1:
            raise ValueError("t0 and t1 must differ")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")
        if self.record_every < 0:
            raise ValueError("record_every must be >= 0")


def X_field(p):
    """Right-hand side of Nahm's equations; the gradient of Phi."""
    return poisson.grad_X(p)


# ---------------------------------------------------------------------------
# Trajectories

def _phi_rows(states):
    a, b, c = states[:, 0], states[:, 1], states[:, 2]
    return np.einsum("ni,ni->n", a, np.cross(b, c))


def _casimir_rows(states):
    a, b, c = states[:, 0], states[:, 1], states[:, 2]
    dot = lambda x, y: np.einsum("ni,ni->n", x, y)
    aa, bb, cc = dot(a, a), dot(b, b), dot(c, c)
    return np.column_stack([dot(a, b), dot(b, c), dot(c, a), aa - bb, bb - cc])


def _normX_rows(states):
    a, b, c = states[:, 0], states[:, 1], states[:, 2]
    X = np.stack([np.cross(b, c), np.cross(c, a), np.cross(a, b)], axis=1)
    return np.sqrt(np.einsum("nij,nij->n", X, X))


@dataclass
class Trajectory:
    times: np.ndarray  # (n,)
    states: np.ndarray  # (n, 3, 3)
    status: int = 0
    n_accepted: int = 0
    n_rejected: int = 0
    backend: str = ""
    phi: np.ndarray = field(init=False, repr=False)
    F: np.ndarray = field(init=False, repr=False)
    casimirs: np.ndarray = field(init=False, repr=False)
    normX: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        s = self.states
        self.phi = _phi_rows(s)
        self.F = np.einsum("nij,nij->n", s, s)
        self.casimirs = _casimir_rows(s)
        self.normX = _normX_rows(s)

    def __len__(self):
        return len(self.times)

    @property
    def samples(self):
        return list(zip(self.times, self.states))

    @property
    def status_name(self):
        return STATUS_NAMES[self.status]

    @property
    def final(self):
        return self.states[-1]

    def casimir_drift(self):
        return float(np.max(np.abs(self.casimirs - self.casimirs[0])))

    def monitors(self):
        """Per-sample rows ``(phi, F, cas1..cas5, normX)``."""
        return np.column_stack([self.phi, self.F, self.casimirs, self.normX])

    def write_csv(self, path):
        rows = np.column_stack([self.times, self.states.reshape(len(self), 9), self.monitors()])
        with open(path, "w", newline="") as fh:
            fh.write(CSV_VERSION + "\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_HEADER)
            for row in rows:
                w.writerow([format(float(v), ".17g") for v in row])


def read_csv(path):
    """Inverse of :meth:`Trajectory.write_csv` (states only)."""
    with open(path) as fh:
        first = fh.readline().rstrip("\n")
        if first != CSV_VERSION:
            raise ValueError(f"unexpected trajectory header {first!r}")
        data = np.loadtxt(fh, delimiter=",", skiprows=1, ndmin=2)
    return Trajectory(data[:, 0], data[:, 1:10].reshape(-1, 3, 3))


def integrate(p0, cfg=None, backend=None, strict=False, eps_crit=0.0, f_max=0.0,
              phi_neg_tol=-1.0):
    """Integrate Nahm's equations from ``p0`` over ``[cfg.t0, cfg.t1]``.

    Optional stops: ``eps_crit`` (``|X|`` small), ``f_max`` (``F`` large) and
    ``phi_neg_tol`` (``Phi < -tol``).  A step-size underflow ends the run with
    status ``underflow``; with ``strict=True`` it raises
    :class:`StepSizeUnderflow` instead.
    """
    cfg = cfg or FlowConfig()
    kern = _backend.kernel if backend is None else _backend.get(backend)
    y0 = poisson.as_point(p0).ravel()
    times, states, status, nacc, nrej = kern.dopri5(
        y0, float(cfg.t0), float(cfg.t1), cfg.rel_tol, cfg.abs_tol, 0.0,
        int(cfg.max_steps), float(cfg.record_every), float(f_max), float(eps_crit),
        float(phi_neg_tol))
    traj = Trajectory(np.asarray(times), np.asarray(states).reshape(-1, 3, 3), int(status),
                      int(nacc), int(nrej), "cython" if kern is not _backend._nahm_py else "python")
    if strict and status == 3:
        raise StepSizeUnderflow(f"step size underflow at t = {traj.times[-1]!r}")
    return traj


def rk4_reference(p0, t0, t1, nsteps, backend=None):
    """Fixed-step RK4 trajectory; the cross-check oracle."""
    kern = _backend.kernel if backend is None else _backend.get(backend)
    times, states = kern.rk4_fixed(poisson.as_point(p0).ravel(), float(t0), float(t1), int(nsteps))
    return np.asarray(times), np.asarray(states).reshape(-1, 3, 3)


def closed_form_s0(lam, t):
    """Exact solution through ``(lam e1, lam e2, lam e3)`` at ``t = 0``."""
    if not lam > 0:
        raise ValueError("lambda must be positive")
    d = lam * t - 1.0
    if abs(d) <= 1e-15:
        raise PoleReached(f"lambda * t = 1 at t = {t!r}")
    return (-lam / d) * np.eye(3)


def lemma51_residuals(p, method="analytic", h=1e-6):
    """``|L_X Phi - |X|^2|`` and ``|L_X F - 6 Phi|``.

    ``analytic`` differentiates Phi and F by the product rule; ``fd`` uses
    central differences along X.
    """
    p = poisson.as_point(p)
    a, b, c = p
    X = X_field(p)
    normX2 = float(np.sum(X * X))
    ph = poisson.phi(p)
    if method == "analytic":
        va, vb, vc = X
        dphi = va @ np.cross(b, c) + a @ np.cross(vb, c) + a @ np.cross(b, vc)
        dF = 2.0 * float(np.sum(p * X))
    elif method == "fd":
        dphi = (poisson.phi(p + h * X) - poisson.phi(p - h * X)) / (2 * h)
        dF = (poisson.F(p + h * X) - poisson.F(p - h * X)) / (2 * h)
    else:
        raise ValueError(f"unknown method {method!r}")
    return abs(float(dphi) - normX2), abs(float(dF) - 6.0 * ph)


# ---------------------------------------------------------------------------
# Basin classification

@dataclass
class ConvergenceReport:
    verdict: str  # ConvergesTo, Diverges, LeavesPositivity or Inconclusive
    r: float
    limit_point: np.ndarray
    t_reached: float
    thresholds: dict
    status: str = ""
    heuristic: bool = False
    min_normX: float = float("nan")  # closest approach to the critical set

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "r": self.r,
            "limit_point": None if self.limit_point is None else self.limit_point.ravel().tolist(),
            "t_reached": self.t_reached,
            "thresholds": dict(self.thresholds),
            "status": self.status,
            "heuristic": self.heuristic,
            "min_normX": self.min_normX,
        }


def _limit_radius(p):
    mu = np.sort(np.linalg.eigvalsh(poisson.gram(p)))[::-1]
    return math.sqrt(max(mu[0] - 0.5 * (mu[1] + mu[2]), 0.0))


def _refine_limit(traj, eps_crit, k=5):
    # Average the trailing samples that are already within the critical band.
    idx = [i for i in range(len(traj) - 1, max(len(traj) - 1 - k, -1), -1)
           if traj.normX[i] <= eps_crit]
    if not idx:
        return traj.final.copy()
    mean = traj.states[idx].mean(axis=0)
    if np.linalg.norm(X_field(mean)) <= eps_crit:
        return mean
    return traj.final.copy()


def classify_limit(p0, cfg=None, eps_crit=EPS_CRIT, f_max_factor=F_MAX_FACTOR,
                   phi_neg_tol=PHI_NEG_TOL, backend=None):
    """Backward-flow verdict for ``p0``.

    ``ConvergesTo`` once ``|X| <= eps_crit`` with the state bounded;
    ``Diverges`` when ``F > f_max_factor * F(p0)`` or the step size underflows;
    ``LeavesPositivity`` when a start with ``Phi > 0`` reaches ``Phi < -tol``.
    Runs that hit ``max_steps`` or the end of the interval are ``Inconclusive``.
    Non-convergence verdicts are threshold based and flagged ``heuristic``.
    """
    cfg = cfg or FlowConfig(t1=CLASSIFY_T1)
    if not cfg.t1 < cfg.t0:
        raise ValueError("classification needs backward time (t1 < t0)")
    p0 = poisson.as_point(p0)
    F0 = poisson.F(p0)
    f_max = f_max_factor * F0
    thresholds = {"eps_crit": eps_crit, "F_max": f_max, "phi_neg_tol": phi_neg_tol,
                  "rel_tol": cfg.rel_tol, "abs_tol": cfg.abs_tol}
    if np.linalg.norm(X_field(p0)) <= eps_crit:
        return ConvergenceReport("ConvergesTo", _limit_radius(p0), p0.copy(), float(cfg.t0),
                                 thresholds, "critical_start",
                                 min_normX=float(np.linalg.norm(X_field(p0))))
    start_positive = poisson.phi(p0) > 0
    traj = integrate(p0, cfg, backend=backend, eps_crit=eps_crit, f_max=f_max,
                     phi_neg_tol=phi_neg_tol if start_positive else -1.0)
    t_end = float(traj.times[-1])
    status = traj.status_name
    closest = float(traj.normX.min())
    if traj.status == 1 and traj.F[-1] <= f_max:
        limit = _refine_limit(traj, eps_crit)
        return ConvergenceReport("ConvergesTo", _limit_radius(limit), limit, t_end, thresholds, status,
                                 min_normX=closest)
    if traj.status in (2, 3):
        verdict = "Diverges"
    elif traj.status == 5:
        verdict = "LeavesPositivity"
    else:
        verdict = "Inconclusive"
    return ConvergenceReport(verdict, float("nan"), None, t_end, thresholds, status, heuristic=True,
                             min_normX=closest)
