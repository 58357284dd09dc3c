"""Seeded verification suites over random sample points.

Each suite evaluates a set of named checks at ``samples`` points and keeps
the maximum residual per check.  A check passes when that maximum is at most
its tolerance; the suite passes when every check does.  Point ``i`` of a suite
draws from its own generator, so results do not depend on ``jobs``.
"""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from . import flow, leaf, poisson, projection
from .errors import HyperLieError
from .lie import adjoint_rotation, cyclic_frame, random_rotation
from .report import dumps
from .sampling import (REGIONS, point_rng, random_complex, random_M_o_point, random_S_point,
                       random_unit)

# name -> default tolerance (the tolerance ladder)
DEFAULT_TOLERANCES = {
    "jacobi_frames": 1e-8,
    "jacobi_combinations": 1e-8,
    "jacobi_mixed": 1e-8,
    "jacobi_linear": 1e-8,
    "condition_10": 1e-8,
    "condition_11": 1e-8,
    "equivariance": 1e-8,
    "equivariance_finite": 1e-9,
    "frame_covariance": 1e-9,
    "frame_explicit": 1e-9,
    "system13": 1e-9,
    "system13_closed_form": 1e-12,
    "leaf_squares": 1e-8,
    "leaf_cross_brackets": 1e-8,
    "leaf_self_brackets": 1e-8,
    "leaf_contraction": 1e-8,
    "leaf_quaternion": 1e-8,
    "metric_XX": 1e-8,
    "metric_xixi": 1e-8,
    "metric_signature": 0.5,  # number of eigenvalues of g whose sign is not -sign(Phi)
    "metric_frame_independence": 1e-8,
    "metric_symmetry": 1e-8,
    "metric_alternative_g": 1e-8,
    "casimir_along_X": 1e-10,
    "casimir_along_adjoint": 1e-10,
    "casimir_hamiltonian": 1e-10,
    "casimir_drift": 1e-6,
    "poisson_map_pr12": 1e-10,
    "poisson_map_pr13": 1e-10,
    "projection_rank": 0.5,  # |rank - 4|
    "orbit_casimir": 1e-7,
    "kks": 1e-6,
    "kks_sign": 0.5,  # 1 when a point needs the other sign than point 0
}

SUITE_CHECKS = {
    "jacobi": ["jacobi_frames", "jacobi_combinations", "jacobi_mixed", "jacobi_linear"],
    "conditions": ["condition_10", "condition_11", "equivariance", "equivariance_finite"],
    "frames": ["frame_covariance", "frame_explicit"],
    "system13": ["system13", "system13_closed_form"],
    "leaf": ["leaf_squares", "leaf_cross_brackets", "leaf_self_brackets", "leaf_contraction",
             "leaf_quaternion"],
    "metric": ["metric_XX", "metric_xixi", "metric_signature", "metric_frame_independence",
               "metric_symmetry", "metric_alternative_g"],
    "casimir": ["casimir_along_X", "casimir_along_adjoint", "casimir_hamiltonian",
                "casimir_drift"],
    "projection": ["poisson_map_pr12", "poisson_map_pr13", "projection_rank", "orbit_casimir",
                   "kks", "kks_sign"],
}
SUITES = tuple(SUITE_CHECKS)
MAX_FAILURES = 20
N_COMBINATIONS = 20
DRIFT_T1 = -20.0


@dataclass
class RunConfig:
    seed: int = 0
    samples: int = 50
    tol_overrides: dict = field(default_factory=dict)
    region: str = "both"
    phi_floor: float = poisson.PHI_FLOOR

    def __post_init__(self):
        if int(self.samples) < 1:
            raise ValueError("samples must be >= 1")
        if self.region not in REGIONS:
            raise ValueError(f"region must be one of {', '.join(REGIONS)}")
        if not self.phi_floor > 0:
            raise ValueError("phi_floor must be positive")
        for name, val in self.tol_overrides.items():
            if name not in DEFAULT_TOLERANCES:
                raise ValueError(f"unknown tolerance {name!r}")
            if not float(val) > 0:
                raise ValueError(f"tolerance {name!r} must be positive")

    @property
    def tolerances(self):
        tol = dict(DEFAULT_TOLERANCES)
        tol.update({k: float(v) for k, v in self.tol_overrides.items()})
        return tol


@dataclass
class SuiteReport:
    suite: str
    seed: int
    samples: int
    region: str
    phi_floor: float
    checks: dict
    failing_points: list
    tolerances: dict
    notes: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(c["passed"] for c in self.checks.values())

    def to_dict(self):
        return {"suite": self.suite, "seed": self.seed, "samples": self.samples,
                "region": self.region, "phi_floor": self.phi_floor, "checks": self.checks,
                "failing_points": self.failing_points, "tolerances": self.tolerances,
                "passed": self.passed, "notes": self.notes}

    def to_json(self):
        return dumps(self.to_dict()) + "\n"


def _rng(cfg, suite, i):
    return point_rng(cfg.seed, SUITES.index(suite) + 1, i)


def _random_linear(rng):
    return poisson.LinearFn(int(rng.integers(1, 4)), tuple(rng.normal(size=3)))


# ---------------------------------------------------------------------------
# Per-point evaluations.  Each returns ([(check, residual, point)], extras).

def _point_jacobi(cfg, i):
    rng = _rng(cfg, "jacobi", i)
    p = random_M_o_point(rng, cfg.region)
    fl = cfg.phi_floor
    J = poisson.jacobi_blocks(p, fl)
    frames = max(float(np.max(np.abs(J[k, k]))) for k in range(3))
    combos = max(float(np.max(np.abs(poisson.combined_jacobi(J, random_unit(rng)))))
                 for _ in range(N_COMBINATIONS))
    mixed = max(float(np.max(np.abs(J[k, l] + J[l, k]))) for k in range(3) for l in range(k + 1, 3))
    f, g, h = (_random_linear(rng) for _ in range(3))
    lin = max(abs(poisson.jacobiator(f, g, h, p, tuple(float(k == j) for j in range(3)), fl))
              for k in range(3))
    return [("jacobi_frames", frames, p), ("jacobi_combinations", combos, p),
            ("jacobi_mixed", mixed, p), ("jacobi_linear", lin, p)], {}


def _point_conditions(cfg, i):
    rng = _rng(cfg, "conditions", i)
    p = random_M_o_point(rng, cfg.region)
    fl = cfg.phi_floor
    xi, eta, zeta = rng.normal(size=(3, 3))
    r10, r11 = poisson.check_conditions_AB(p, xi, eta, fl)
    eq = poisson.check_equivariance(p, xi, eta, zeta, fl)
    fin = poisson.equivariance_finite(p, adjoint_rotation(rng.normal(size=3)), fl)
    return [("condition_10", r10, p), ("condition_11", r11, p), ("equivariance", eq, p),
            ("equivariance_finite", fin, p)], {}


def _point_frames(cfg, i):
    rng = _rng(cfg, "frames", i)
    p = random_M_o_point(rng, cfg.region)
    fl = cfg.phi_floor
    O = random_rotation(rng)
    f, g = _random_linear(rng), _random_linear(rng)
    cov = poisson.frame_covariance_check(p, O, f, g, fl)
    # T_1 bracket of <xi, a>, <eta, a> against the closed form <[xi, eta], 2 a11 a - a'>
    xi, eta = rng.normal(size=(2, 3))
    T1 = poisson.poisson_bracket(poisson.LinearFn(1, xi), poisson.LinearFn(1, eta), p,
                                 O @ cyclic_frame(1), floor=fl)
    a_new = O[:, 0] @ p
    expl = abs(T1 - np.cross(xi, eta) @ (2 * O[0, 0] * p[0] - a_new))
    return [("frame_covariance", cov, p), ("frame_explicit", expl, p)], {}


def _point_system13(cfg, i):
    rng = _rng(cfg, "system13", i)
    p = random_M_o_point(rng, cfg.region)
    fl = cfg.phi_floor
    xis = rng.normal(size=(3, 3))
    res = max(poisson.solve_system13(p, xi, tol=np.inf, floor=fl, full=True).residual
              for xi in xis)
    a, b, c = p
    z = np.zeros(3)
    closed = max(poisson.system13_residual(p, a, [z, z, -b], fl),
                 poisson.system13_residual(p, b, [-c, z, z], fl),
                 poisson.system13_residual(p, c, [z, -a, z], fl))
    return [("system13", res, p), ("system13_closed_form", closed, p)], {}


def _point_leaf(cfg, i):
    rng = _rng(cfg, "leaf", i)
    p = random_M_o_point(rng, cfg.region)
    chart = leaf.leaf_chart(p, floor=cfg.phi_floor)
    forms = leaf.restricted_forms(chart, floor=cfg.phi_floor)
    r = leaf.compatibility_residuals(chart, forms)
    return [("leaf_squares", r["squares"], p), ("leaf_cross_brackets", r["cross_brackets"], p),
            ("leaf_self_brackets", r["self_brackets"], p),
            ("leaf_contraction", r["contraction"], p), ("leaf_quaternion", r["quaternion"], p)], {}


def _point_metric(cfg, i):
    rng = _rng(cfg, "metric", i)
    p = random_M_o_point(rng, cfg.region)
    fl = cfg.phi_floor
    chart = leaf.leaf_chart(p, floor=fl)
    forms = leaf.restricted_forms(chart, floor=fl)
    metric = leaf.leaf_metric(chart, forms)
    gXX, gxx, _ = leaf.metric_on_generators(chart, metric)
    ph = poisson.phi(p)
    xi = random_unit(rng)
    A = poisson.a_value(p, fl)
    ev = np.linalg.eigvalsh(0.5 * (metric.g + metric.g.T))
    wrong = int(np.sum(np.sign(ev) != -np.sign(ph)))
    ind = leaf.frame_independence_of_g(p, random_rotation(rng), fl)
    r = leaf.compatibility_residuals(chart, forms, metric)
    return [("metric_XX", abs(gXX + ph), p), ("metric_xixi", abs(xi @ gxx @ xi + xi @ A @ xi), p),
            ("metric_signature", wrong, p), ("metric_frame_independence", ind, p),
            ("metric_symmetry", r["symmetry"], p), ("metric_alternative_g", r["alternative_g"], p)], {}


def _point_casimir(cfg, i):
    rng = _rng(cfg, "casimir", i)
    p = random_M_o_point(rng, cfg.region)
    fl = cfg.phi_floor
    alongX = float(np.max(np.abs(poisson.casimir_dderiv(p, poisson.grad_X(p)))))
    xi = rng.normal(size=3)
    alongA = float(np.max(np.abs(poisson.casimir_dderiv(p, poisson.adjoint_generator(p, xi)))))
    dC = poisson.casimir_gradients(p).reshape(5, 9)
    ham = max(float(np.max(np.abs(poisson.bivector(p, k, floor=fl) @ dC.T))) for k in (1, 2, 3))
    # Flows that exist on all of [0, -20]: points of S_0 and of S_O with r <= 1.
    r = 0.0 if i % 2 == 0 else float(rng.uniform(0.1, 1.0))
    q = random_S_point(rng, r, float(rng.uniform(0.2, 1.5)))
    traj = flow.integrate(q, flow.FlowConfig(0.0, DRIFT_T1))
    drift = traj.casimir_drift() if traj.status == 0 else float("inf")
    return [("casimir_along_X", alongX, p), ("casimir_along_adjoint", alongA, p),
            ("casimir_hamiltonian", ham, p), ("casimir_drift", drift, q)], {}


def _point_projection(cfg, i):
    rng = _rng(cfg, "projection", i)
    p = random_M_o_point(rng, cfg.region)
    fl = cfg.phi_floor
    x, y = random_complex(rng), random_complex(rng)
    pm12 = projection.poisson_map_residual(p, x, y, "12", floor=fl)
    pm13 = projection.poisson_map_residual(p, x, y, "13", floor=fl)
    # alternate between a regular S_O leaf (r = 1) and S_0
    r = 1.0 if i % 2 == 0 else 0.0
    q = random_S_point(rng, r, float(rng.uniform(0.3, 1.5)))
    rank_gap = abs(projection.projection_rank(q, floor=fl) - 4)
    cas = projection.orbit_classify(projection.pr12(q)).casimir
    cas_gap = abs(cas - projection.expected_casimir(q))
    try:
        kks, sign = projection.kks_pullback_residual(q, floor=fl)
    except HyperLieError:
        kks, sign = float("inf"), 0
    return [("poisson_map_pr12", pm12, p), ("poisson_map_pr13", pm13, p),
            ("projection_rank", rank_gap, q), ("orbit_casimir", cas_gap, q),
            ("kks", kks, q)], {"kks_sign": (sign, q)}


POINT_FUNCS = {
    "jacobi": _point_jacobi,
    "conditions": _point_conditions,
    "frames": _point_frames,
    "system13": _point_system13,
    "leaf": _point_leaf,
    "metric": _point_metric,
    "casimir": _point_casimir,
    "projection": _point_projection,
}


def _safe_point(suite, cfg, i):
    try:
        return POINT_FUNCS[suite](cfg, i)
    except HyperLieError as exc:
        return [(name, float("inf"), None) for name in SUITE_CHECKS[suite]], {"error": repr(exc)}


def _evaluate(suite, cfg, jobs):
    fn = partial(_safe_point, suite, cfg)
    idx = range(int(cfg.samples))
    if jobs and jobs > 1:
        with ProcessPoolExecutor(jobs) as ex:
            return list(ex.map(fn, idx, chunksize=max(1, cfg.samples // (4 * jobs))))
    return [fn(i) for i in idx]


def _aggregate(suite, cfg, results, checks, failing, notes):
    tol = cfg.tolerances
    acc = {name: [0.0, 0] for name in SUITE_CHECKS[suite]}
    signs = []
    errors = []
    for i, (rows, extra) in enumerate(results):
        if "error" in extra:
            errors.append({"index": i, "error": extra["error"]})
        for name, res, pt in rows:
            res = float(res)
            a = acc[name]
            a[1] += 1
            if not (res <= a[0]):
                a[0] = res
            if not (res <= tol[name]) and len(failing) < MAX_FAILURES:
                failing.append({"check": name, "index": i, "residual": res,
                                "point": None if pt is None else np.asarray(pt).ravel().tolist()})
        if "kks_sign" in extra:
            signs.append((i, extra["kks_sign"]))
    if "kks_sign" in acc:
        ref = signs[0][1][0] if signs else 0
        worst = 0.0
        for i, (s, q) in signs:
            bad = float(s != ref)
            worst = max(worst, bad)
            acc["kks_sign"][1] += 1
            if bad and len(failing) < MAX_FAILURES:
                failing.append({"check": "kks_sign", "index": i, "residual": bad,
                                "point": np.asarray(q).ravel().tolist()})
        acc["kks_sign"][0] = worst
        notes["kks_sign"] = ref
    if errors:
        notes[f"{suite}_errors"] = errors
    for name, (mx, n) in acc.items():
        checks[name] = {"max_residual": mx, "tolerance": tol[name], "count": n,
                        "passed": bool(mx <= tol[name])}


def run_suite(suite, cfg, jobs=1):
    """Run one suite (or ``all``) and return a :class:`SuiteReport`."""
    names = SUITES if suite == "all" else (suite,)
    for name in names:
        if name not in SUITE_CHECKS:
            raise ValueError(f"unknown suite {suite!r}")
    checks, failing, notes = {}, [], {}
    for name in names:
        _aggregate(name, cfg, _evaluate(name, cfg, jobs), checks, failing, notes)
    if "kks_sign" in notes:
        notes["kks_sign_convention"] = "omega_1 = kks_sign * pullback of Re<z, [u, v]>"
    return SuiteReport(suite, int(cfg.seed), int(cfg.samples), cfg.region, float(cfg.phi_floor),
                       checks, failing, cfg.tolerances, notes)
