import json

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperlie import flow, leaf, poisson, projection
from hyperlie.lie import adjoint_rotation
from hyperlie.poisson import LinearFn
from hyperlie.report import dumps
from hyperlie.sampling import standard_S_point

from conftest import M_o_points, finite, points, vec3

slots = st.integers(1, 3)
frames = st.integers(1, 3)
radii = st.floats(0.1, 2.0)
lams = st.floats(0.2, 2.0)


def size(p):
    return 1.0 + poisson.F(p)


@given(M_o_points)
def test_A_symmetric_and_sends_a_to_bc(p):
    A = poisson.a_value(p)
    assert np.max(np.abs(A - A.T)) <= 1e-12 * (1 + np.abs(A).max())
    assert np.allclose(A @ p[0], np.cross(p[1], p[2]), rtol=1e-8, atol=1e-8 * size(p) ** 2)


@given(M_o_points, slots, slots, slots, vec3, vec3, vec3, frames)
@settings(max_examples=40)
def test_jacobi_identity(p, i, j, k, x, y, z, frame):
    f, g, h = LinearFn(i, x), LinearFn(j, y), LinearFn(k, z)
    coeffs = tuple(float(m == frame) for m in (1, 2, 3))
    scale = (1 + np.abs(x).max()) * (1 + np.abs(y).max()) * (1 + np.abs(z).max())
    scale *= (1 + np.abs(poisson.a_value(p)).max()) ** 2
    assert abs(poisson.jacobiator(f, g, h, p, coeffs)) <= 1e-10 * scale


@given(M_o_points, vec3, vec3)
def test_equivariance_property(p, xi, eta):
    A = np.abs(poisson.a_value(p)).max()
    s = (1 + A) * size(p) * (1 + np.abs(xi).max()) * (1 + np.abs(eta).max()) ** 2
    assert poisson.check_equivariance(p, xi, eta, eta) <= 1e-10 * s


@given(M_o_points, vec3)
def test_equivariance_finite_rotation(p, xi):
    A = np.abs(poisson.a_value(p)).max()
    assert poisson.equivariance_finite(p, adjoint_rotation(xi)) <= 1e-10 * (1 + A)


@given(M_o_points, frames)
def test_casimirs_are_casimirs(p, frame):
    dC = poisson.casimir_gradients(p).reshape(5, 9)
    P = poisson.bivector(p, frame)
    assert np.max(np.abs(P @ dC.T)) <= 1e-10 * size(p) * (1 + np.abs(P).max())


@given(points)
def test_lemma51(p):
    assert max(flow.lemma51_residuals(p)) <= 1e-12 * size(p) ** 2


@given(radii, lams)
def test_standard_S_points_classify(r, lam):
    p = standard_S_point(r, lam)
    cls = poisson.classify_S(p)
    assert cls.kind == "S_O"
    assert abs(cls.r - r) <= 1e-8 and abs(cls.lam - lam) <= 1e-8
    assert np.allclose(poisson.a_extended(p), poisson.a_value(p, floor=1e-14), atol=1e-10 * (1 + lam))


@given(radii, lams, vec3)
def test_S_is_invariant_under_rotation(r, lam, xi):
    p = poisson.rotate_point(standard_S_point(r, lam), adjoint_rotation(xi))
    cls = poisson.classify_S(p)
    assert cls.kind == "S_O" and abs(cls.r - r) <= 1e-7


@given(points, vec3)
def test_orbit_casimir_invariant_under_rotation(p, xi):
    R = adjoint_rotation(xi)
    c0 = projection.orbit_classify(projection.pr12(p)).casimir
    c1 = projection.orbit_classify(projection.pr12(poisson.rotate_point(p, R))).casimir
    assert abs(c0 - c1) <= 1e-12 * size(p)


@given(M_o_points, vec3, vec3, vec3, vec3)
def test_pr12_is_poisson(p, a, b, c, d):
    x, y = a + 1j * b, c + 1j * d
    s = size(p) * (1 + np.abs(x).max()) * (1 + np.abs(y).max())
    assert projection.poisson_map_residual(p, x, y) <= 1e-12 * s


@given(M_o_points)
@settings(max_examples=30)
def test_metric_on_X(p):
    chart = leaf.leaf_chart(p)
    forms = leaf.restricted_forms(chart)
    gXX, _, _ = leaf.metric_on_generators(chart, leaf.leaf_metric(chart, forms))
    assert abs(gXX + poisson.phi(p)) <= 1e-8 * size(p) ** 3


@given(st.lists(finite | st.just(float("nan")) | st.just(float("inf")), max_size=5))
def test_report_json_is_valid_and_stable(vals):
    d = {"b": vals, "a": {"z": 1, "y": vals[:1]}}
    text = dumps(d)
    assert text == dumps(json.loads(text))
    back = json.loads(text)
    for v, w in zip(vals, back["b"]):
        assert (w is None) if not np.isfinite(v) else w == v
