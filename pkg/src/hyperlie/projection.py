"""Projections of ``su(2)^3`` onto ``sl(2, C)`` and the orbits they land on.

``pr12(a, b, c) = a + ib`` and ``pr13(a, b, c) = a + ic``.  On ``sl(2, C)``
viewed as a real Lie algebra the pairing is ``Re <z, w>`` with the
complex-bilinear extension of the inner product, so the linear function
``l_x(z) = Re <x, z>`` pulls back under ``pr12`` to ``l^1_{Re x} - l^2_{Im x}``.
"""
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import leaf, poisson
from .errors import RankDeficient
from .lie import complex_bracket, complex_pairing

ORBIT_TOL = 1e-9
RANK_RTOL = 1e-8
AD_SOLVE_TOL = 1e-9


def _slot(which):
    if which in ("12", 12, 2):
        return 1
    if which in ("13", 13, 3):
        return 2
    raise ValueError(f"unknown projection {which!r}")


def pr12(p):
    a, b, _ = poisson.as_point(p)
    return a + 1j * b


def pr13(p):
    a, _, c = poisson.as_point(p)
    return a + 1j * c


def project(p, which="12"):
    p = poisson.as_point(p)
    return p[0] + 1j * p[_slot(which)]


def dproject(v, which="12"):
    """Pushforward of a tangent vector; the projections are linear."""
    return project(v, which)


def pushforward_X(p, which="12"):
    return dproject(poisson.grad_X(p), which)


def pushforward_generator(p):
    """``u`` with ``d pr12(X) = ad_u (a + ib)``; it is ``i c``."""
    return 1j * poisson.as_point(p)[2]


def lie_poisson_bracket(x, y, z):
    """``{l_x, l_y}(z) = Re <[x, y], z>``."""
    return float(complex_pairing(complex_bracket(x, y), z).real)


def pulled_back_covector(x, which="12"):
    """Differential of ``l_x o pr`` on ``M`` as a (3, 3) array."""
    x = np.asarray(x, dtype=complex)
    g = np.zeros((3, 3))
    g[0] = x.real
    g[_slot(which)] = -x.imag
    return g


def poisson_map_residual(p, x, y, which="12", frame=1, floor=poisson.PHI_FLOOR):
    """``|{l_x o pr, l_y o pr}(p) - {l_x, l_y}(pr(p))|`` for the frame-1 structure."""
    p = poisson.as_point(p)
    P = poisson.bivector(p, frame, floor=floor)
    lhs = pulled_back_covector(x, which).ravel() @ P @ pulled_back_covector(y, which).ravel()
    return abs(float(lhs) - lie_poisson_bracket(x, y, project(p, which)))


class OrbitKind(str, Enum):
    ZERO = "zero"
    NILPOTENT = "nilpotent"
    REGULAR_SEMISIMPLE = "regular_semisimple"


@dataclass(frozen=True)
class OrbitClass:
    casimir: complex
    kind: OrbitKind


def orbit_classify(z, tol=ORBIT_TOL):
    z = np.asarray(z, dtype=complex)
    cas = complex_pairing(z, z)
    if np.linalg.norm(z) <= tol:
        kind = OrbitKind.ZERO
    elif abs(cas) <= tol:
        kind = OrbitKind.NILPOTENT
    else:
        kind = OrbitKind.REGULAR_SEMISIMPLE
    return OrbitClass(cas, kind)


def expected_casimir(p):
    """Casimir of the orbit ``pr12`` maps a point of ``S_O`` or ``S_0`` to.

    The Gram matrix of such a point is ``lam^2 Id + r^2 n n^T``; the limit
    critical point has rows proportional to ``n``, so the casimir is
    ``r^2 (n_1 + i n_2)^2``.  In a standard frame ``n = e1`` and this is ``r^2``.
    """
    O, r, _ = poisson.find_standard_frame(p)
    n = O[:, 0]
    return complex(r ** 2 * (n[0] + 1j * n[1]) ** 2)


def _realify(z):
    z = np.asarray(z, dtype=complex)
    return np.concatenate([z.real, z.imag])


def _rank(M, rtol=RANK_RTOL):
    s = np.linalg.svd(M, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > rtol * s[0]))


def projection_matrix(p, which="12"):
    """6x4 real matrix of ``d pr`` on the leaf generators ``e1^, e2^, e3^, X``."""
    B = leaf.leaf_generators(p)
    return np.column_stack([_realify(dproject(B[:, k].reshape(3, 3), which)) for k in range(4)])


def projection_rank(p, which="12", floor=poisson.PHI_FLOOR):
    poisson._require_M_o(poisson.as_point(p), floor)
    return _rank(projection_matrix(p, which))


def _ad_matrix(z):
    # Real 6x6 matrix of u -> [u, z] acting on (Re u, Im u).
    cols = []
    for k in range(6):
        u = np.zeros(3, dtype=complex)
        u[k % 3] = 1.0 if k < 3 else 1j
        cols.append(_realify(complex_bracket(u, z)))
    return np.column_stack(cols)


def kks_matrix(p, which="12", tol=AD_SOLVE_TOL):
    """KKS form of the orbit through ``pr(p)`` on the pushed-forward leaf generators.

    Each image ``v_k`` is written as ``ad_{u_k} z`` by least squares and the
    form is ``Re <z, [u_k, u_l]>``.  Raises :class:`RankDeficient` when some
    ``v_k`` is not tangent to the orbit.
    """
    z = project(p, which)
    M = _ad_matrix(z)
    V = projection_matrix(p, which)
    U, *_ = np.linalg.lstsq(M, V, rcond=None)
    resid = np.linalg.norm(M @ U - V, axis=0)
    scale = 1.0 + np.linalg.norm(V, axis=0)
    if np.any(resid > tol * scale):
        raise RankDeficient(f"pushed-forward vector off the orbit (residual {resid.max():.3e})")
    us = [U[:3, k] + 1j * U[3:, k] for k in range(4)]
    K = np.zeros((4, 4))
    for k in range(4):
        for l in range(4):
            K[k, l] = complex_pairing(z, complex_bracket(us[k], us[l])).real
    return K


def kks_pullback_residual(p, sign=None, which="12", floor=poisson.PHI_FLOOR):
    """Sup-norm gap between the leaf form ``omega_1`` and ``sign`` times the pulled-back KKS form.

    With ``sign=None`` the better of ``+1`` and ``-1`` is chosen.  Returns
    ``(residual, sign)``.
    """
    chart = leaf.leaf_chart(p, floor=floor)
    W1 = leaf.restricted_forms(chart, floor=floor).w1
    K = kks_matrix(p, which)
    if sign is None:
        res = {s: float(np.max(np.abs(W1 - s * K))) for s in (1, -1)}
        sign = min(res, key=res.get)
        return res[sign], sign
    return float(np.max(np.abs(W1 - sign * K))), sign
