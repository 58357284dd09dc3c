import numpy as np
import pytest

from hyperlie import poisson as P
from hyperlie.errors import NoSolution, NotInS, SingularPoint
from hyperlie.lie import adjoint_rotation, cyclic_frame, random_rotation
from hyperlie.poisson import LinearFn
from hyperlie.sampling import random_M_o_point, random_S_point, standard_S_point

from conftest import E1, E2, E3

Z = np.zeros(3)
STD = P.point(E1, E2, E3)
FLIP = P.point(E1, E3, E2)
R2 = np.sqrt(2.0)


def pts(rng, n, region="both"):
    return [random_M_o_point(rng, region) for _ in range(n)]


def test_phi_examples():
    assert P.phi(STD) == 1.0
    assert P.phi(FLIP) == -1.0
    assert P.phi(P.point(E1, E1, E2)) == 0.0


def test_grad_X_examples():
    assert np.array_equal(P.grad_X(STD), STD)
    assert np.array_equal(P.grad_X(P.point(3 * E1 + E2, Z, Z)), np.zeros((3, 3)))


def test_grad_X_matches_fd_gradient_of_phi(rng):
    for p in pts(rng, 20):
        assert np.allclose(P.ScalarField(P.phi).grad(p), P.grad_X(p), atol=1e-8)


def test_a_value_examples():
    assert np.allclose(P.a_value(STD), np.eye(3), atol=1e-15)
    assert np.allclose(P.a_value(FLIP), -np.eye(3), atol=1e-15)
    assert np.allclose(P.a_value(2 * STD), 2 * np.eye(3), atol=1e-15)


def test_a_value_rejects_singular_points():
    with pytest.raises(SingularPoint):
        P.a_value(P.point(E1, E1, E2))
    with pytest.raises(SingularPoint):
        P.a_value(1e-3 * STD)  # Phi = 1e-9 below the default floor
    assert np.allclose(P.a_value(1e-3 * STD, floor=1e-12), 1e-3 * np.eye(3))


def test_a_sends_rows_to_brackets(rng):
    for p in pts(rng, 30):
        a, b, c = p
        A = P.a_value(p)
        assert np.allclose(A, A.T, atol=1e-12)
        scale = 1 + np.linalg.norm(A)
        assert np.max(np.abs(A @ a - np.cross(b, c))) <= 1e-10 * scale
        assert np.max(np.abs(A @ b - np.cross(c, a))) <= 1e-10 * scale
        assert np.max(np.abs(A @ c - np.cross(a, b))) <= 1e-10 * scale


def test_a_homogeneous_and_invariant_under_mixing_rows(rng):
    for p in pts(rng, 20):
        A = P.a_value(p)
        for lam in (0.5, 3.0, -2.0):
            assert np.allclose(P.a_value(lam * p), lam * A, rtol=1e-10, atol=1e-10)
        O = random_rotation(rng)
        assert np.allclose(P.a_value(P.change_frame(p, O)), A, rtol=1e-9, atol=1e-9)
        # orientation reversing mixing flips the sign
        assert np.allclose(P.a_value(P.change_frame(p, -O)), -A, rtol=1e-9, atol=1e-9)


def test_a_dderiv_examples():
    assert np.array_equal(P.a_dderiv(STD, np.zeros((3, 3))), np.zeros((3, 3)))
    assert np.allclose(P.a_dderiv(STD, STD), np.eye(3), atol=1e-14)


def test_a_dderiv_matches_central_difference(rng):
    for p in pts(rng, 20):
        dp = rng.normal(size=(3, 3))
        h = 1e-6
        fd = (P.a_value(p + h * dp) - P.a_value(p - h * dp)) / (2 * h)
        an = P.a_dderiv(p, dp)
        assert np.max(np.abs(fd - an)) <= 1e-5 * (1 + np.max(np.abs(an)))


def test_bivector_antisymmetric(rng):
    for p in pts(rng, 10):
        for k in (1, 2, 3):
            B = P.bivector(p, k)
            assert np.max(np.abs(B + B.T)) == 0.0


def test_ham_vf_examples():
    assert np.allclose(P.ham_vf(STD, LinearFn(1, E1)), [Z, -E3, E2], atol=1e-15)
    assert np.allclose(P.ham_vf(STD, LinearFn(2, E1)), [-E3, Z, E1], atol=1e-15)
    assert np.array_equal(P.ham_vf(STD, LinearFn(1, Z)), np.zeros((3, 3)))


def test_ham_vf_l3_in_frame_two(rng):
    for p in pts(rng, 20):
        a, b, c = p
        xi = rng.normal(size=3)
        want = np.array([P.a_value(p) @ xi, -np.cross(xi, c), np.cross(xi, b)])
        got = P.ham_vf(p, LinearFn(3, xi), 2)
        assert np.max(np.abs(got - want)) <= 1e-10 * (1 + np.max(np.abs(want)))


def test_pi_sharp_examples(rng):
    assert np.allclose(P.pi_sharp(STD, [Z, Z, E2]), [-E1, -E2, -E3], atol=1e-15)
    for p in pts(rng, 10):
        a, b, c = p
        xi = rng.normal(size=3)
        assert np.allclose(P.pi_sharp(p, [xi, Z, Z]),
                           [-np.cross(xi, a), -np.cross(xi, b), -np.cross(xi, c)], atol=1e-12)
        assert np.allclose(P.pi_sharp(p, [Z, xi, Z]),
                           [-np.cross(xi, b), np.cross(xi, a), P.a_value(p) @ xi],
                           rtol=1e-10, atol=1e-10)


def test_bracket_examples(rng):
    p = rng.normal(size=(3, 3))
    p = p if abs(P.phi(p)) > 1e-3 else STD
    assert P.poisson_bracket(LinearFn(1, E1), LinearFn(1, E2), p) == pytest.approx(p[0] @ E3, abs=1e-14)
    assert P.poisson_bracket(LinearFn(2, E1), LinearFn(3, E1), STD) == pytest.approx(1.0, abs=1e-15)
    f = LinearFn(2, rng.normal(size=3))
    assert abs(P.poisson_bracket(f, f, p)) <= 1e-15


def test_bivector_reproduces_the_defining_table(rng):
    for p in pts(rng, 20):
        for i in (1, 2, 3):
            for j in (1, 2, 3):
                f, g = LinearFn(i, rng.normal(size=3)), LinearFn(j, rng.normal(size=3))
                want = P.linear_bracket(f, g, p)
                assert abs(P.poisson_bracket(f, g, p) - want) <= 1e-12 * (1 + abs(want))


def test_bracket_is_a_derivation_of_X_f():
    # X_f g = {f, g}
    f, g = LinearFn(2, (1.0, 2.0, -1.0)), LinearFn(3, (0.5, 0.0, 2.0))
    p = P.point((1, 0.2, 0), (0.1, 1, 0.3), (0, -0.4, 1))
    assert np.sum(P.ham_vf(p, f) * g.grad()) == pytest.approx(P.poisson_bracket(f, g, p), rel=1e-13)


def test_jacobiator_examples(rng):
    p = random_M_o_point(rng)
    f = LinearFn(2, rng.normal(size=3))
    h = LinearFn(3, rng.normal(size=3))
    assert abs(P.jacobiator(f, f, h, p)) <= 1e-12
    for coeffs in ((1, 0, 0), (0, 1, 0), (0, 0, 1), tuple(rng.normal(size=3))):
        g = LinearFn(1, rng.normal(size=3))
        assert abs(P.jacobiator(f, g, h, p, coeffs)) <= 1e-8


def test_jacobi_tensor_matches_blocks_and_pointwise(rng):
    p = random_M_o_point(rng)
    J = P.jacobi_blocks(p)
    k = rng.normal(size=3)
    assert np.allclose(P.combined_jacobi(J, k), P.jacobi_tensor(p, tuple(k)), atol=1e-12)
    assert np.max(np.abs(P.combined_jacobi(J, k))) <= 1e-8
    f, g, h = (LinearFn(s, rng.normal(size=3)) for s in (1, 2, 3))
    for i, j in ((1, 2), (2, 3), (1, 3)):
        assert abs(P.mixed_jacobiator(f, g, h, p, i, j)) <= 1e-8


def test_jacobiator_detects_a_broken_A(rng, monkeypatch):
    # A non-equivariant A must break the Jacobi identity; guards against a vacuous check.
    p = random_M_o_point(rng)
    orig = P.a_value
    monkeypatch.setattr(P, "a_value", lambda q, floor=P.PHI_FLOOR: orig(q, floor) + np.diag([1.0, 0, 0]))
    assert np.max(np.abs(P.jacobi_tensor(p))) > 1e-3


def test_conditions_examples(rng):
    assert max(P.check_conditions_AB(STD, E1, E2)) <= 1e-10
    xi = rng.normal(size=3)
    assert P.check_conditions_AB(STD, xi, xi) == (0.0, 0.0)
    for p in pts(rng, 30):
        xi, eta = rng.normal(size=(2, 3))
        assert max(P.check_conditions_AB(p, xi, eta)) <= 1e-8


def test_equivariance(rng):
    assert P.check_equivariance(STD, Z, E1, E2) == 0.0
    for p in pts(rng, 30):
        xi, eta, zeta = rng.normal(size=(3, 3))
        assert P.check_equivariance(p, xi, eta, zeta) <= 1e-8
        assert P.equivariance_finite(p, adjoint_rotation(rng.normal(size=3))) <= 1e-9


def test_equivariance_plus_sign_fails(rng):
    # xi^ A_{eta,zeta} = +(A_{[xi,eta],zeta} + A_{eta,[xi,zeta]}) is not the identity
    p = random_M_o_point(rng)
    xi, eta, zeta = rng.normal(size=(3, 3))
    A = P.a_value(p)
    lhs = eta @ P.a_dderiv(p, P.adjoint_generator(p, xi)) @ zeta
    rhs = np.cross(xi, eta) @ A @ zeta + eta @ A @ np.cross(xi, zeta)
    assert abs(lhs - rhs) > 1e-3


def test_frame_covariance(rng):
    f, g = LinearFn(1, (1, 2, 3)), LinearFn(2, (0, 1, -1))
    p = random_M_o_point(rng)
    assert P.frame_covariance_check(p, np.eye(3), f, g) == 0.0
    for _ in range(30):
        p = random_M_o_point(rng)
        O = random_rotation(rng)
        f, g = (LinearFn(int(rng.integers(1, 4)), rng.normal(size=3)) for _ in range(2))
        assert P.frame_covariance_check(p, O, f, g) <= 1e-9


def test_frame_one_bracket_closed_form(rng):
    for _ in range(20):
        p = random_M_o_point(rng)
        O = random_rotation(rng)
        xi, eta = rng.normal(size=(2, 3))
        got = P.poisson_bracket(LinearFn(1, xi), LinearFn(1, eta), p, O)
        a_new = O[:, 0] @ p
        want = np.cross(xi, eta) @ (2 * O[0, 0] * p[0] - a_new)
        assert abs(got - want) <= 1e-9


def test_system13_closed_forms(rng):
    assert np.array_equal(P.solve_system13(STD, Z), np.zeros((3, 3)))
    for p in pts(rng, 30):
        a, b, c = p
        assert P.system13_residual(p, a, [Z, Z, -b]) <= 1e-12
        assert P.system13_residual(p, b, [-c, Z, Z]) <= 1e-12
        assert P.system13_residual(p, c, [Z, -a, Z]) <= 1e-12


def test_system13_random_xi_and_frame_covariance(rng):
    for p in pts(rng, 20):
        xi = rng.normal(size=3)
        sol = P.solve_system13(p, xi, full=True)
        assert sol.residual <= 1e-9
        assert P.system13_residual(p, xi, sol.uvw) <= 1e-9
        O = random_rotation(rng)
        # a solution transforms like a point under a frame change
        assert P.system13_residual(P.change_frame(p, O), xi, P.change_frame(sol.uvw, O)) <= 1e-9


def test_system13_unsolvable_rhs_raises(monkeypatch):
    p = P.point((1, 0.1, 0), (0, 1, 0.2), (0.3, 0, 1))
    orig = P.system13_rhs
    monkeypatch.setattr(P, "system13_rhs", lambda q, xi, floor=P.PHI_FLOOR: orig(q, xi, floor) + 1.0)
    with pytest.raises(NoSolution):
        P.solve_system13(p, E1)


def test_casimirs_examples():
    assert np.array_equal(P.casimirs(STD), np.zeros(5))
    assert np.array_equal(P.casimirs(P.point(2 * E1, E2, E3)), [0, 0, 0, 3, 0])


def test_casimirs_annihilated_by_all_three_structures(rng):
    for p in pts(rng, 20):
        dC = P.casimir_gradients(p).reshape(5, 9)
        for k in (1, 2, 3):
            assert np.max(np.abs(P.bivector(p, k) @ dC.T)) <= 1e-10
        assert np.max(np.abs(P.casimir_dderiv(p, P.grad_X(p)))) <= 1e-10
        xi = rng.normal(size=3)
        assert np.max(np.abs(P.casimir_dderiv(p, P.adjoint_generator(p, xi)))) <= 1e-10


def test_casimir_gradients_match_fd(rng):
    p = rng.normal(size=(3, 3))
    for k in range(5):
        fd = P.fd_gradient(lambda q: P.casimirs(q)[k], p)
        assert np.allclose(fd, P.casimir_gradients(p)[k], atol=1e-8)


def test_gram_examples():
    assert np.array_equal(P.gram(STD), np.eye(3))
    assert np.array_equal(P.gram(P.point(2 * E1, E2, E3)), np.diag([4.0, 1, 1]))


def test_classify_S_examples():
    assert P.classify_S(STD) == ("S_0", 0.0, 1.0)
    k, r, lam = P.classify_S(P.point(R2 * E1, E2, E3))
    assert k == "S_O" and r == pytest.approx(1, abs=1e-14) and lam == pytest.approx(1, abs=1e-14)
    assert P.classify_S(FLIP).kind == "not_in_S"
    assert P.classify_S(P.point(3 * E1, Z, Z)) == ("S_O", 3.0, 0.0)
    assert P.classify_S(P.point(E1, 2 * E2, 3 * E3)).kind == "not_in_S"
    assert P.classify_S(P.point(E1, 2 * E2, E3)).kind == "S_O"


def test_find_standard_frame_examples(rng):
    O, r, lam = P.find_standard_frame(P.point(3 * E1, Z, Z))
    assert abs(abs(O[0, 0]) - 1) <= 1e-15 and r == 3.0 and lam == 0.0
    _, r, lam = P.find_standard_frame(P.point(R2 * E1, E2, E3))
    assert (r, lam) == pytest.approx((1, 1), abs=1e-14)
    _, r, lam = P.find_standard_frame(STD)
    assert (r, lam) == (0.0, 1.0)
    with pytest.raises(NotInS):
        P.find_standard_frame(FLIP)


def test_find_standard_frame_recovers_standard_coordinates(rng):
    for _ in range(20):
        r, lam = rng.uniform(0.2, 2, size=2)
        p = random_S_point(rng, r, lam)
        O, r2, lam2 = P.find_standard_frame(p)
        assert np.linalg.det(O) == pytest.approx(1.0, abs=1e-12)
        assert (r2, lam2) == pytest.approx((r, lam), rel=1e-8)
        q = P.change_frame(p, O)
        assert np.allclose(q @ q.T, np.diag([lam ** 2 + r ** 2, lam ** 2, lam ** 2]), atol=1e-10)
        assert P.phi(q) > 0


def test_a_extended_examples():
    r = 2.5
    A = P.a_extended(P.point(r * E1, Z, Z))
    assert abs(E1 @ A @ E1) <= 1e-12
    assert E2 @ A @ E2 == pytest.approx(r, abs=1e-12)
    assert np.array_equal(P.a_extended(np.zeros((3, 3))), np.zeros((3, 3)))
    assert np.allclose(P.a_extended(P.point(R2 * E1, E2, E3)), P.a_value(P.point(R2 * E1, E2, E3)),
                       atol=1e-10)


def test_a_extended_critical_closed_form(rng):
    for _ in range(10):
        a0 = rng.normal(size=3)
        n = np.linalg.norm(a0)
        want = n * np.eye(3) - np.outer(a0, a0) / n
        assert np.max(np.abs(P.a_extended(P.point(a0, Z, Z)) - want)) <= 1e-12


def test_a_extended_scalar_formula_uses_norm_of_a_prime(rng):
    # A_{xi,xi} = sqrt(lam^2+r^2)|xi|^2 - r^2/sqrt(lam^2+r^2) xi_1^2 with xi_1 = <xi, a'>/|a'|
    for _ in range(10):
        r, lam = rng.uniform(0.2, 2, size=2)
        p = standard_S_point(r, lam)
        A = P.a_value(p)
        xi = rng.normal(size=3)
        s = np.sqrt(lam ** 2 + r ** 2)
        a1 = p[0]
        xi1 = xi @ a1 / np.linalg.norm(a1)
        assert xi @ A @ xi == pytest.approx(s * xi @ xi - r ** 2 / s * xi1 ** 2, abs=1e-10)
        bad = xi @ a1 / (a1 @ a1)
        assert abs(xi @ A @ xi - (s * xi @ xi - r ** 2 / s * bad ** 2)) > 1e-6


def test_a_extended_matches_a_value_on_S(rng):
    for lam in (0.1, 1.0, 10.0):
        for _ in range(5):
            p = random_S_point(rng, rng.uniform(0.2, 2), lam)
            A = P.a_value(p, floor=1e-14)
            assert np.max(np.abs(P.a_extended(p) - A)) <= 1e-10 * max(1.0, lam)


def test_a_extended_rejects_points_outside_S():
    with pytest.raises(NotInS):
        P.a_extended(FLIP)


def test_cyclic_frames_are_coordinate_permutations(rng):
    # pi_2 in the original coordinates equals pi_1 evaluated at the permuted point
    p = random_M_o_point(rng)
    f, g = LinearFn(1, rng.normal(size=3)), LinearFn(2, rng.normal(size=3))
    for k in (2, 3):
        O = cyclic_frame(k)
        q = P.change_frame(p, O)
        fq = P.change_frame(f.grad(), O)
        gq = P.change_frame(g.grad(), O)
        want = P.poisson_bracket(fq, gq, q)
        assert P.poisson_bracket(f, g, p, k) == pytest.approx(want, abs=1e-12)
