"""The hyper-Lie Poisson structure on su(2) x su(2) x su(2).

A point is a 3x3 float array whose rows are ``a, b, c``.  Tangent vectors and
covectors at a point use the same (3, 3) layout; flattened they are 9-vectors
ordered ``(a, b, c)``.

The Poisson tensor of the reference frame is stored as a 9x9 antisymmetric
matrix ``P`` with ``{f, g} = df . P . dg``.  Hamiltonian vector fields are
``X_f = pi#(df) = -P df`` so that ``X_f g = {f, g}``.  Other frames are
obtained by the change of coordinates ``p' = O.T @ p``.
"""
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np

from .errors import NoSolution, NotInS, SingularPoint
from .lie import cyclic_frame, hat

PHI_FLOOR = 1e-8
# relative tolerance on Gram eigenvalue equality in classify_S
GRAM_RTOL = 1e-7
SYSTEM13_TOL = 1e-9


def as_point(p):
    p = np.array(p, dtype=float)
    if p.shape == (9,):
        p = p.reshape(3, 3)
    if p.shape != (3, 3):
        raise ValueError(f"expected a (3, 3) point, got shape {p.shape}")
    return p


def point(a, b, c):
    return as_point([a, b, c])


# ---------------------------------------------------------------------------
# Phi, its gradient and the F function

def phi(p):
    """The cocycle ``<a, [b, c]>``."""
    a, b, c = as_point(p)
    return float(np.dot(a, np.cross(b, c)))


def grad_X(p):
    """Gradient of :func:`phi`: ``X = ([b, c], [c, a], [a, b])``."""
    a, b, c = as_point(p)
    return np.array([np.cross(b, c), np.cross(c, a), np.cross(a, b)])


def dgrad_X(p, dp):
    """Directional derivative of ``X`` at ``p`` along ``dp`` (X is quadratic)."""
    a, b, c = as_point(p)
    da, db, dc = as_point(dp)
    return np.array([np.cross(db, c) + np.cross(b, dc),
                     np.cross(dc, a) + np.cross(c, da),
                     np.cross(da, b) + np.cross(a, db)])


def F(p):
    """``<a, a> + <b, b> + <c, c>``."""
    p = as_point(p)
    return float(np.sum(p * p))


def in_M_o(p, floor=PHI_FLOOR):
    return abs(phi(p)) > floor


def _require_M_o(p, floor):
    value = phi(p)
    if not abs(value) > floor:
        raise SingularPoint(value, floor)
    return value


def adjoint_generator(p, xi):
    """Infinitesimal generator ``xi^ = ([xi, a], [xi, b], [xi, c])`` of the diagonal adjoint action."""
    return np.cross(np.asarray(xi, dtype=float), as_point(p))


def rotate_point(p, R):
    """Diagonal adjoint action ``(Ra, Rb, Rc)``."""
    return as_point(p) @ np.asarray(R).T


def change_frame(p, O):
    """Coordinates in the frame ``(e1, e2, e3) O``: ``(a', b', c') = (a, b, c) O``."""
    return np.asarray(O).T @ as_point(p)


# ---------------------------------------------------------------------------
# The tensor A

def a_value(p, floor=PHI_FLOOR):
    """``A = ([a,b]x[a,b] + [b,c]x[b,c] + [c,a]x[c,a]) / Phi`` on ``M_o``.

    Returns a symmetric 3x3 matrix; ``A_{xi, eta} = xi @ A @ eta``.
    """
    p = as_point(p)
    value = _require_M_o(p, floor)
    W = grad_X(p)
    return (W.T @ W) / value


def a_dderiv(p, dp, floor=PHI_FLOOR):
    """Directional derivative ``d/dt A(p + t dp)`` at ``t = 0`` (quotient rule)."""
    p = as_point(p)
    dp = as_point(dp)
    value = _require_M_o(p, floor)
    W = grad_X(p)
    dW = dgrad_X(p, dp)
    dphi = float(np.sum(W * dp))
    N = W.T @ W
    dN = dW.T @ W + W.T @ dW
    return dN / value - N * (dphi / value ** 2)


def a_tensor(p, extended=False, floor=PHI_FLOOR):
    """A on ``M_o``; with ``extended=True`` falls back to :func:`a_extended` on S."""
    if extended and not in_M_o(p, floor):
        return a_extended(p)
    return a_value(p, floor)


# ---------------------------------------------------------------------------
# Functions on M

@dataclass(frozen=True)
class LinearFn:
    """The linear function ``l^slot_xi``, e.g. ``l^1_xi(a, b, c) = <xi, a>``."""

    slot: int
    xi: tuple

    def __post_init__(self):
        if self.slot not in (1, 2, 3):
            raise ValueError("slot must be 1, 2 or 3")
        object.__setattr__(self, "xi", tuple(float(v) for v in self.xi))

    def __call__(self, p):
        return float(np.dot(self.xi, as_point(p)[self.slot - 1]))

    def grad(self, p=None):
        g = np.zeros((3, 3))
        g[self.slot - 1] = self.xi
        return g


@dataclass(frozen=True)
class ScalarField:
    """A function on M with an optional analytic gradient.

    Without ``grad_fn`` the gradient is a central difference with step
    ``1e-5 * (1 + |p|)``.
    """

    fn: Callable
    grad_fn: Optional[Callable] = None

    def __call__(self, p):
        return float(self.fn(as_point(p)))

    def grad(self, p):
        p = as_point(p)
        if self.grad_fn is not None:
            return as_point(self.grad_fn(p))
        return fd_gradient(self.fn, p)


def fd_gradient(fn, p, h=None):
    p = as_point(p)
    if h is None:
        h = 1e-5 * (1.0 + np.linalg.norm(p))
    g = np.zeros(9)
    flat = p.ravel()
    for k in range(9):
        step = np.zeros(9)
        step[k] = h
        g[k] = (fn((flat + step).reshape(3, 3)) - fn((flat - step).reshape(3, 3))) / (2 * h)
    return g.reshape(3, 3)


def covector(f, p):
    """Differential of ``f`` at ``p`` as a (3, 3) array."""
    if isinstance(f, (LinearFn, ScalarField)):
        return f.grad(p)
    return as_point(f)


# ---------------------------------------------------------------------------
# Bivectors

def _frame_matrix(frame):
    if isinstance(frame, (int, np.integer)):
        return cyclic_frame(int(frame))
    return np.asarray(frame, dtype=float)


def _reference_bivector(p, A):
    a, b, c = p
    Ha, Hb, Hc = hat(a), hat(b), hat(c)
    return np.block([[-Ha, -Hb, -Hc],
                     [-Hb, Ha, A],
                     [-Hc, -A, Ha]])


def _reference_bivector_dderiv(dp, dA):
    return _reference_bivector(as_point(dp), dA)


def bivector(p, frame=1, extended=False, floor=PHI_FLOOR):
    """9x9 matrix of the Poisson tensor for a frame.

    ``frame`` is 1, 2, 3 (the reference frame and its cyclic permutations) or
    an explicit 3x3 orthogonal matrix relating the frame to the reference one.
    """
    p = as_point(p)
    O = _frame_matrix(frame)
    q = change_frame(p, O)
    A = a_tensor(q, extended=extended, floor=floor)
    K = np.kron(O, np.eye(3))
    return K @ _reference_bivector(q, A) @ K.T


def bivector_dderiv(p, dp, frame=1, floor=PHI_FLOOR):
    """Directional derivative of :func:`bivector` along ``dp``."""
    p = as_point(p)
    O = _frame_matrix(frame)
    q = change_frame(p, O)
    dq = change_frame(dp, O)
    K = np.kron(O, np.eye(3))
    return K @ _reference_bivector_dderiv(dq, a_dderiv(q, dq, floor)) @ K.T


def pi_sharp(p, alpha, frame_index=1, extended=False, floor=PHI_FLOOR):
    """Image of the covector ``alpha = (u, v, w)`` under ``pi#`` of the given frame."""
    P = bivector(p, frame_index, extended=extended, floor=floor)
    return (-P @ as_point(alpha).ravel()).reshape(3, 3)


def ham_vf(p, f, frame_index=1, extended=False, floor=PHI_FLOOR):
    """Hamiltonian vector field ``X_f`` for the given frame."""
    return pi_sharp(p, covector(f, p), frame_index, extended=extended, floor=floor)


def poisson_bracket(f, g, p, frame_index=1, extended=False, floor=PHI_FLOOR):
    P = bivector(p, frame_index, extended=extended, floor=floor)
    return float(covector(f, p).ravel() @ P @ covector(g, p).ravel())


def linear_bracket(f: LinearFn, g: LinearFn, p, floor=PHI_FLOOR):
    """Bracket of two linear functions straight from the defining table (reference frame)."""
    p = as_point(p)
    xi, eta = np.array(f.xi), np.array(g.xi)
    i, j = f.slot, g.slot
    br = np.cross(xi, eta)
    a, b, c = p
    if (i, j) == (1, 1):
        return float(br @ a)
    if (i, j) in ((1, 2), (2, 1)):
        return float(br @ b)
    if (i, j) in ((1, 3), (3, 1)):
        return float(br @ c)
    if (i, j) in ((2, 2), (3, 3)):
        return -float(br @ a)
    A = a_value(p, floor)
    if (i, j) == (2, 3):
        return float(xi @ A @ eta)
    return -float(xi @ A @ eta)


# ---------------------------------------------------------------------------
# Jacobi identities

def _combined(p, coeffs, floor):
    P = np.zeros((9, 9))
    for k, frame in zip(coeffs, (1, 2, 3)):
        if k:
            P += k * bivector(p, frame, floor=floor)
    return P


def _combined_dderiv(p, dp, coeffs, floor):
    dP = np.zeros((9, 9))
    for k, frame in zip(coeffs, (1, 2, 3)):
        if k:
            dP += k * bivector_dderiv(p, dp, frame, floor=floor)
    return dP


def _double(alpha, beta, gamma, p, P_outer, coeffs_inner, floor):
    # {{f, g}_inner, h}_outer for linear f, g, h
    v = (P_outer @ gamma).reshape(3, 3)
    return float(alpha @ _combined_dderiv(p, v, coeffs_inner, floor) @ beta)


def jacobiator(f, g, h, p, coeffs=(1.0, 0.0, 0.0), floor=PHI_FLOOR):
    """``{{f,g},h} + {{g,h},f} + {{h,f},g}`` for ``k1 pi_1 + k2 pi_2 + k3 pi_3``.

    ``f, g, h`` are linear functions (or constant covectors).  The derivative of
    the bivector is analytic.
    """
    p = as_point(p)
    _require_M_o(p, floor)
    al, be, ga = (covector(x, p).ravel() for x in (f, g, h))
    P = _combined(p, coeffs, floor)
    return (_double(al, be, ga, p, P, coeffs, floor)
            + _double(be, ga, al, p, P, coeffs, floor)
            + _double(ga, al, be, p, P, coeffs, floor))


def mixed_jacobiator(f, g, h, p, i, j, floor=PHI_FLOOR):
    """``{f,{g,h}_j}_i + {f,{g,h}_i}_j`` + cyclic; vanishes iff ``pi_i`` and ``pi_j`` are compatible."""
    p = as_point(p)
    _require_M_o(p, floor)
    ci = tuple(1.0 if k == i else 0.0 for k in (1, 2, 3))
    cj = tuple(1.0 if k == j else 0.0 for k in (1, 2, 3))
    Pi, Pj = _combined(p, ci, floor), _combined(p, cj, floor)
    al, be, ga = (covector(x, p).ravel() for x in (f, g, h))
    total = 0.0
    for x, y, z in ((al, be, ga), (be, ga, al), (ga, al, be)):
        # {x, {y, z}_j}_i = -{{y, z}_j, x}_i
        total -= _double(y, z, x, p, Pi, cj, floor)
        total -= _double(y, z, x, p, Pj, ci, floor)
    return total


def jacobi_tensor(p, coeffs=(1.0, 0.0, 0.0), floor=PHI_FLOOR):
    """Jacobiator on all 9^3 triples of coordinate linear functions at once."""
    p = as_point(p)
    _require_M_o(p, floor)
    P = _combined(p, coeffs, floor)
    dP = np.stack([_combined_dderiv(p, np.eye(9)[m].reshape(3, 3), coeffs, floor)
                   for m in range(9)], axis=-1)
    T = np.einsum("ijm,mk->ijk", dP, P)
    return T + T.transpose(1, 2, 0) + T.transpose(2, 0, 1)


def jacobi_blocks(p, floor=PHI_FLOOR):
    """Pairwise Jacobi tensors ``J[i, j]`` (shape (3, 3, 9, 9, 9)).

    The Jacobiator of ``k1 pi_1 + k2 pi_2 + k3 pi_3`` on coordinate functions
    is ``sum_ij k_i k_j J[i, j]``; ``J[i, j] + J[j, i]`` is the mixed
    Jacobiator of frames i and j.
    """
    p = as_point(p)
    _require_M_o(p, floor)
    Ps = [bivector(p, k, floor=floor) for k in (1, 2, 3)]
    dPs = [np.stack([bivector_dderiv(p, np.eye(9)[m].reshape(3, 3), k, floor=floor)
                     for m in range(9)], axis=-1) for k in (1, 2, 3)]
    J = np.empty((3, 3, 9, 9, 9))
    for i in range(3):
        for j in range(3):
            T = np.einsum("ijm,mk->ijk", dPs[i], Ps[j])
            J[i, j] = T + T.transpose(1, 2, 0) + T.transpose(2, 0, 1)
    return J


def combined_jacobi(blocks, coeffs):
    k = np.asarray(coeffs, float)
    return np.einsum("i,j,ijabc->abc", k, k, blocks)


# ---------------------------------------------------------------------------
# Conditions on A

def _contract_along(p, v, xi, floor):
    # xi -| (v A), a g-valued function
    return a_dderiv(p, v, floor) @ xi


def check_conditions_AB(p, xi, eta, floor=PHI_FLOOR):
    """Residual norms of the two conditions making the bivector Poisson.

    ``xi -| X_{l2_eta} A - eta -| X_{l2_xi} A = [c, [xi, eta]]`` and
    ``xi -| X_{l3_eta} A - eta -| X_{l3_xi} A = [b, [eta, xi]]``.
    """
    p = as_point(p)
    _require_M_o(p, floor)
    xi, eta = np.asarray(xi, float), np.asarray(eta, float)
    a, b, c = p

    def X2(z):
        return ham_vf(p, LinearFn(2, z), 1, floor=floor)

    def X3(z):
        return ham_vf(p, LinearFn(3, z), 1, floor=floor)

    lhs_a = _contract_along(p, X2(eta), xi, floor) - _contract_along(p, X2(xi), eta, floor)
    lhs_b = _contract_along(p, X3(eta), xi, floor) - _contract_along(p, X3(xi), eta, floor)
    res_a = np.linalg.norm(lhs_a - np.cross(c, np.cross(xi, eta)))
    res_b = np.linalg.norm(lhs_b - np.cross(b, np.cross(eta, xi)))
    return float(res_a), float(res_b)


def check_equivariance(p, xi, eta, zeta, floor=PHI_FLOOR):
    """Residual of infinitesimal equivariance of A along ``xi^``.

    With ``xi^ = ([xi,a],[xi,b],[xi,c])`` the identity that holds (and that
    the Jacobi identity requires) is
    ``xi^ A_{eta,zeta} + A_{[xi,eta],zeta} + A_{eta,[xi,zeta]} = 0``.
    """
    p = as_point(p)
    xi, eta, zeta = (np.asarray(v, float) for v in (xi, eta, zeta))
    A = a_value(p, floor)
    lhs = eta @ a_dderiv(p, adjoint_generator(p, xi), floor) @ zeta
    rhs = -(np.cross(xi, eta) @ A @ zeta + eta @ A @ np.cross(xi, zeta))
    return float(abs(lhs - rhs))


def equivariance_finite(p, R, floor=PHI_FLOOR):
    """``|A(R p) - R A(p) R^T|`` for a rotation ``R``."""
    p = as_point(p)
    A = a_value(p, floor)
    return float(np.max(np.abs(a_value(rotate_point(p, R), floor) - R @ A @ R.T)))


def frame_covariance_check(p, O, f, g, floor=PHI_FLOOR):
    """Residual of ``({f,g}_T1, {f,g}_T2, {f,g}_T3) = ({f,g}_F1, {f,g}_F2, {f,g}_F3) O``."""
    p = as_point(p)
    O = np.asarray(O, float)
    new = np.array([poisson_bracket(f, g, p, O @ cyclic_frame(k), floor=floor)
                    for k in (1, 2, 3)])
    old = np.array([poisson_bracket(f, g, p, k, floor=floor) for k in (1, 2, 3)])
    return float(np.max(np.abs(new - old @ O)))


# ---------------------------------------------------------------------------
# System (13)

def system13_matrix(p, floor=PHI_FLOOR):
    p = as_point(p)
    A = a_value(p, floor)
    a, b, c = p
    Ha, Hb, Hc = hat(a), hat(b), hat(c)
    return np.block([[A, -Hc, Hb],
                     [Hc, A, -Ha],
                     [-Hb, Ha, A],
                     [Ha, Hb, Hc]])


def system13_rhs(p, xi, floor=PHI_FLOOR):
    p = as_point(p)
    xi = np.asarray(xi, float)
    A = a_value(p, floor)
    return np.concatenate([np.cross(xi, p[0]), np.cross(xi, p[1]), np.cross(xi, p[2]), A @ xi])


def system13_residual(p, xi, sol, floor=PHI_FLOOR):
    """Relative residual of ``(u, v, w)`` (rows of ``sol``) in the 12x9 system."""
    M = system13_matrix(p, floor)
    rhs = system13_rhs(p, xi, floor)
    r = np.linalg.norm(M @ as_point(sol).ravel() - rhs)
    scale = np.linalg.norm(rhs)
    return float(r / scale) if scale > 0 else float(r)


class System13Solution(NamedTuple):
    uvw: np.ndarray
    residual: float
    kernel_dim: int


def solve_system13(p, xi, tol=SYSTEM13_TOL, floor=PHI_FLOOR, full=False):
    """Least-squares solution ``(u, v, w)`` of System (13), rows of a (3, 3) array.

    Raises :class:`NoSolution` when the relative residual exceeds ``tol``.
    With ``full=True`` a :class:`System13Solution` with the numerical kernel
    dimension of the 12x9 matrix is returned.
    """
    M = system13_matrix(p, floor)
    rhs = system13_rhs(p, xi, floor)
    x, _, rank, _ = np.linalg.lstsq(M, rhs, rcond=None)
    sol = x.reshape(3, 3)
    res = system13_residual(p, xi, sol, floor)
    if res > tol:
        raise NoSolution(f"relative residual {res:.3e} exceeds {tol:.1e}")
    if full:
        return System13Solution(sol, res, 9 - int(rank))
    return sol


# ---------------------------------------------------------------------------
# Casimirs, Gram matrix and the set S

def casimirs(p):
    a, b, c = as_point(p)
    return np.array([a @ b, b @ c, c @ a, a @ a - b @ b, b @ b - c @ c])


def casimir_gradients(p):
    """Gradients of the five casimirs, shape (5, 3, 3)."""
    a, b, c = as_point(p)
    z = np.zeros(3)
    return np.array([[b, a, z],
                     [z, c, b],
                     [c, z, a],
                     [2 * a, -2 * b, z],
                     [z, 2 * b, -2 * c]])


def casimir_dderiv(p, v):
    """Directional derivatives of the five casimirs along the tangent ``v``."""
    return np.einsum("kij,ij->k", casimir_gradients(p), as_point(v))


def gram(p):
    p = as_point(p)
    return p @ p.T


class SClass(NamedTuple):
    kind: str  # "S_O", "S_0" or "not_in_S"
    r: float
    lam: float


def _gram_tol(G):
    return GRAM_RTOL * (1.0 + float(np.trace(G)))


def _spectrum(p):
    G = gram(p)
    mu, V = np.linalg.eigh(G)
    return G, mu[::-1], V[:, ::-1]


def classify_S(p):
    """Membership in ``S_O`` (with orbit radius r), ``S_0`` or neither.

    Uses the casimir-level description: the two smallest Gram eigenvalues
    agree, the gap to the largest is ``r^2`` and ``Phi >= 0``.
    """
    p = as_point(p)
    G, mu, _ = _spectrum(p)
    tol = _gram_tol(G)
    if phi(p) < -tol * np.sqrt(1.0 + np.trace(G)):
        return SClass("not_in_S", float("nan"), float("nan"))
    if mu[1] - mu[2] > tol:
        return SClass("not_in_S", float("nan"), float("nan"))
    lam2 = max(0.5 * (mu[1] + mu[2]), 0.0)
    gap = mu[0] - lam2
    if gap > tol:
        return SClass("S_O", float(np.sqrt(gap)), float(np.sqrt(lam2)))
    lam2 = max(float(np.mean(mu)), 0.0)
    return SClass("S_0", 0.0, float(np.sqrt(lam2)))


def find_standard_frame(p):
    """Frame ``O`` (det +1), orbit radius ``r`` and ``lambda`` for a point of S.

    In the new coordinates ``(a', b', c') = (a, b, c) O`` the triple is
    orthogonal with ``|b'| = |c'| = lambda`` and ``|a'|^2 = lambda^2 + r^2``.
    """
    p = as_point(p)
    cls = classify_S(p)
    if cls.kind == "not_in_S":
        raise NotInS("Gram spectrum or sign of Phi violates the S conditions")
    _, _, V = _spectrum(p)
    O = V.copy()
    if np.linalg.det(O) < 0:
        O[:, 2] = -O[:, 2]
    return O, cls.r, cls.lam


def a_extended(p):
    """A on S, including the critical set.

    In a standard frame this is
    ``sqrt(lam^2 + r^2) Id - r^2 / (lam^2 + r^2)^{3/2} a' (x) a'``,
    which equals :func:`a_value` off the critical set and reduces to
    ``|a0| Id - a0 (x) a0 / |a0|`` at ``(a0, 0, 0)``.  Zero at the origin.
    """
    p = as_point(p)
    if not np.any(p):
        return np.zeros((3, 3))
    O, r, lam = find_standard_frame(p)
    if r == 0.0:
        return lam * np.eye(3)
    a1 = change_frame(p, O)[0]
    s2 = lam ** 2 + r ** 2
    return np.sqrt(s2) * np.eye(3) - (r ** 2 / s2 ** 1.5) * np.outer(a1, a1)

