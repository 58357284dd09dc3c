"""Acceptance criteria 1-11, each at its stated tolerance.

Every test records a PASS/FAIL line (shown in the "acceptance criteria"
section of the pytest summary) and then asserts.
"""
import numpy as np
import pytest

from hyperlie import flow, poisson, suites
from hyperlie.sampling import point_rng, random_M_o_point, random_S_point

SEED = 42
E1, E2, E3 = np.eye(3)
Z = np.zeros(3)


def suite(name, samples, region="both"):
    return suites.run_suite(name, suites.RunConfig(seed=SEED, samples=samples, region=region))


def summary(*reports, names=None):
    checks = {}
    for rep in reports:
        for k, c in rep.checks.items():
            if names is None or k in names:
                prev = checks.get(k)
                if prev is None or c["max_residual"] > prev["max_residual"]:
                    checks[k] = c
    ok = all(c["passed"] for c in checks.values())
    text = ", ".join(f"{k}={c['max_residual']:.1e}/{c['tolerance']:.0e}" for k, c in checks.items())
    return ok, text


def test_criterion_01_jacobi(criterion):
    ok, text = summary(suite("jacobi", 200))
    assert criterion(1, ok, text)


def test_criterion_02_conditions_and_equivariance(criterion):
    ok, text = summary(suite("conditions", 200))
    assert criterion(2, ok, text)


def test_criterion_03_frame_covariance(criterion):
    ok, text = summary(suite("frames", 100))
    assert criterion(3, ok, text)


def test_criterion_04_system13(criterion):
    rep = suite("system13", 200)
    ok, text = summary(rep)
    assert criterion(4, ok, text)


def test_criterion_05_hypersymplectic(criterion):
    plus, minus = suite("leaf", 100, "plus"), suite("leaf", 100, "minus")
    ok, text = summary(plus, minus)
    assert criterion(5, ok, text)


def test_criterion_06_metric(criterion):
    ok, text = summary(suite("metric", 100),
                       names={"metric_XX", "metric_xixi", "metric_signature",
                              "metric_frame_independence"})
    assert criterion(6, ok, text)


def test_criterion_07_casimirs(criterion):
    ok, text = summary(suite("casimir", 100))
    assert criterion(7, ok, text)


def test_criterion_08_nahm_oracle(criterion):
    traj = flow.integrate(poisson.point(E1, E2, E3), flow.FlowConfig(0.0, -10.0))
    err = max(float(np.max(np.abs(s - flow.closed_form_s0(1.0, t)))) for t, s in traj.samples)
    lem = 0.0
    for i in range(100):
        p = random_M_o_point(point_rng(SEED, 100, i))
        lem = max(lem, *flow.lemma51_residuals(p))
    ok = traj.times[-1] == -10.0 and err <= 1e-6 and lem <= 1e-10
    assert criterion(8, ok, f"closed_form={err:.1e}/1e-06, lemma51={lem:.1e}/1e-10")


def _complex_casimir(traj):
    a, b = traj.states[:, 0], traj.states[:, 1]
    return np.einsum("ni,ni->n", a, a) - np.einsum("ni,ni->n", b, b) + 2j * np.einsum("ni,ni->n", a, b)


def _backward(p0):
    rep = flow.classify_limit(p0)
    traj = flow.integrate(p0, flow.FlowConfig(0.0, rep.t_reached), eps_crit=flow.EPS_CRIT)
    return rep, traj


def test_criterion_09_basins(criterion):
    rep1, tr1 = _backward(poisson.point(np.sqrt(2.0) * E1, E2, E3))
    gram_gap = float(np.max(np.abs(poisson.gram(rep1.limit_point) - np.diag([1.0, 0, 0]))))
    cas1 = float(np.max(np.abs(_complex_casimir(tr1) - 1.0)))
    ok1 = rep1.verdict == "ConvergesTo" and gram_gap <= 1e-4 and cas1 <= 1e-8

    rep0, tr0 = _backward(poisson.point(E1, E2, E3))
    # same Gram tolerance as above; |limit| itself is ~sqrt(eps_crit)
    to_zero = float(np.max(np.abs(poisson.gram(rep0.limit_point))))
    cas0 = float(np.max(np.abs(_complex_casimir(tr0))))
    ok0 = rep0.verdict == "ConvergesTo" and to_zero <= 1e-4 and cas0 <= 1e-8

    repm = flow.classify_limit(poisson.point(E1, E3, E2))
    okm = repm.verdict != "ConvergesTo"
    text = (f"S_O: {rep1.verdict} gram={gram_gap:.1e}/1e-04 casimir={cas1:.1e}/1e-08; "
            f"S_0: {rep0.verdict} gram={to_zero:.1e}/1e-04 casimir={cas0:.1e}/1e-08; "
            f"Phi<0: {repm.verdict}")
    assert criterion(9, ok1 and ok0 and okm, text)


def test_criterion_10_projection(criterion):
    rep = suite("projection", 200)
    ok, text = summary(rep)
    counts = rep.checks["projection_rank"]["count"]
    assert counts == 200
    assert criterion(10, ok, f"{text}, kks_sign={rep.notes['kks_sign']:+d}")


def test_criterion_11_a_extension(criterion):
    gap = 0.0
    for lam in (0.1, 1.0, 10.0):
        for i in range(20):
            rng = point_rng(SEED, 110, i)
            p = random_S_point(rng, rng.uniform(0.2, 2.0), lam)
            gap = max(gap, float(np.max(np.abs(poisson.a_extended(p) - poisson.a_value(p, floor=1e-14)))))
    crit = 0.0
    for i in range(20):
        rng = point_rng(SEED, 111, i)
        a0 = rng.normal(size=3)
        n = np.linalg.norm(a0)
        want = n * np.eye(3) - np.outer(a0, a0) / n
        crit = max(crit, float(np.max(np.abs(poisson.a_extended(poisson.point(a0, Z, Z)) - want))))
    ok = gap <= 1e-10 and crit <= 1e-12
    assert criterion(11, ok, f"on S_O={gap:.1e}/1e-10, critical={crit:.1e}/1e-12")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
