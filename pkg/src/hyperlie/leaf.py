"""Pointwise geometry of the 4-dimensional hypersymplectic leaves.

A leaf through a point of ``M_o`` is spanned by the adjoint generators
``e1^, e2^, e3^`` and the gradient field ``X``.  Everything here works in a
chart: a 9x4 matrix ``B`` whose columns are the flattened basis vectors.
Leaf tangent vectors are represented by their 4 chart coordinates.

Bundle maps follow ``<omega^b v, u> = omega(v, u)`` and restricted forms are
pinned by ``omega_i^b(X^i_f) = df``, equivalently
``omega_i(X^i_f, X^i_g) = {g, f}_i``.  If ``P_i = B S_i B^T`` then ``omega_i``
has chart matrix ``W_i = S_i^{-1}`` and ``omega^b = W^T``.  With this sign the
cross relations ``omega_i(X^j_f, X^j_g) = {f, g}_i`` (i != j) hold and the
metric satisfies ``g(X, X) = -Phi``.
"""
from dataclasses import dataclass

import numpy as np

from . import poisson
from .errors import DegenerateBasis, DegenerateRestriction
from .lie import BASIS, cyclic_frame

RANK_RTOL = 1e-8


def _rank(M, rtol=RANK_RTOL):
    s = np.linalg.svd(M, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > rtol * s[0]))


@dataclass(frozen=True)
class LeafChart:
    p: np.ndarray
    B: np.ndarray  # 9x4
    gramB: np.ndarray  # B^T B

    @property
    def basis(self):
        return [self.B[:, k].reshape(3, 3) for k in range(4)]

    def coords(self, v):
        """Chart coordinates of a tangent vector lying in the leaf."""
        return np.linalg.solve(self.gramB, self.B.T @ poisson.as_point(v).ravel())

    def in_span_residual(self, v):
        v = poisson.as_point(v).ravel()
        return float(np.linalg.norm(self.B @ np.linalg.solve(self.gramB, self.B.T @ v) - v))


def leaf_generators(p):
    """The vectors ``e1^, e2^, e3^, X`` as columns of a 9x4 matrix."""
    p = poisson.as_point(p)
    cols = [poisson.adjoint_generator(p, e).ravel() for e in BASIS]
    cols.append(poisson.grad_X(p).ravel())
    return np.column_stack(cols)


def leaf_chart(p, basis=None, extended=False, floor=poisson.PHI_FLOOR, check_image=True):
    """Chart of the leaf through ``p``.

    ``basis`` may supply four alternative tangent vectors; by default the
    generators of the ``R x su(2)`` action are used.  Raises
    :class:`DegenerateBasis` below rank 4 and :class:`SingularPoint` off ``M_o``
    (unless ``extended``).
    """
    p = poisson.as_point(p)
    if basis is None:
        B = leaf_generators(p)
    else:
        B = np.column_stack([poisson.as_point(v).ravel() for v in basis])
    if _rank(B) < 4:
        raise DegenerateBasis("leaf basis has numerical rank < 4")
    if not extended:
        poisson._require_M_o(p, floor)
    if check_image:
        for i in (1, 2, 3):
            P = poisson.bivector(p, i, extended=extended, floor=floor)
            if _rank(np.hstack([B, P])) != 4:
                raise DegenerateBasis(f"image of pi_{i} is not the span of the basis")
    return LeafChart(p, B, B.T @ B)


def restricted_bivector(chart, frame, extended=False, floor=poisson.PHI_FLOOR):
    """4x4 ``S`` with ``P = B S B^T`` for the given frame."""
    P = poisson.bivector(chart.p, frame, extended=extended, floor=floor)
    Ginv = np.linalg.inv(chart.gramB)
    return Ginv @ (chart.B.T @ P @ chart.B) @ Ginv


@dataclass(frozen=True)
class SymplecticTriple:
    chart: LeafChart
    w1: np.ndarray
    w2: np.ndarray
    w3: np.ndarray

    @property
    def forms(self):
        return (self.w1, self.w2, self.w3)

    def omega(self, i, v, u):
        """``omega_i(v, u)`` for tangent vectors ``v, u`` in the leaf."""
        W = self.forms[i - 1]
        return float(self.chart.coords(v) @ W @ self.chart.coords(u))


def restricted_forms(chart, frames=None, extended=False, floor=poisson.PHI_FLOOR):
    """Leaf symplectic forms of the three frames ``F1, F2, F3``.

    ``frames`` may give three explicit frame matrices instead (used for frame
    changes).
    """
    if frames is None:
        frames = (1, 2, 3)
    ws = []
    for frame in frames:
        S = restricted_bivector(chart, frame, extended=extended, floor=floor)
        if _rank(S) < 4:
            raise DegenerateRestriction(f"restricted bivector of frame {frame!r} is singular")
        W = np.linalg.inv(S)
        ws.append(0.5 * (W - W.T))
    return SymplecticTriple(chart, *ws)


@dataclass(frozen=True)
class LeafMetric:
    g: np.ndarray
    I: np.ndarray
    J: np.ndarray
    K: np.ndarray

    def eval(self, chart, v, u):
        return float(chart.coords(v) @ self.g @ chart.coords(u))


def _flat(W):
    return W.T


def leaf_metric(chart, forms):
    """Pseudo-metric ``g = w3^b (w1^b)^-1 w2^b`` and ``I, J, K``."""
    b1, b2, b3 = (_flat(W) for W in forms.forms)
    try:
        gb = b3 @ np.linalg.solve(b1, b2)
        I = np.linalg.solve(b3, b2)
        J = np.linalg.solve(b1, b3)
        K = np.linalg.solve(b2, b1)
    except np.linalg.LinAlgError as exc:
        raise DegenerateRestriction(str(exc)) from exc
    return LeafMetric(gb.T, I, J, K)


def alternative_metric_products(forms):
    """The other two expressions for ``g^b``; both should match :func:`leaf_metric`."""
    b1, b2, b3 = (_flat(W) for W in forms.forms)
    return (b1 @ np.linalg.solve(b2, b3)).T, (b2 @ np.linalg.solve(b3, b1)).T


def metric_on_generators(chart, metric, p=None):
    """``g(X, X)``, the 3x3 block ``g(xi^, eta^)`` and the cross terms ``g(e_k^, X)``."""
    g = metric.g
    return g[3, 3], g[:3, :3], g[:3, 3]


def compatibility_residuals(chart, forms, metric=None):
    """Max residuals of the hypersymplectic identities on the chart.

    Keys: ``squares`` (``[w_i^b (w_j^b)^-1]^2 = -1``), ``cross_brackets``
    (``w_i(X^j_f, X^j_g) = {f, g}_i`` for i != j on all coordinate linear
    functions), ``self_brackets`` (``w_i(X^i_f, X^i_g) = {g, f}_i``),
    ``quaternion``, ``contraction`` (``X -| w2 = IX -| w3`` on the basis),
    ``symmetry`` and ``alternative_g``.
    """
    if metric is None:
        metric = leaf_metric(chart, forms)
    flats = [_flat(W) for W in forms.forms]
    one = np.eye(4)
    squares = 0.0
    for i in range(3):
        for j in range(3):
            if i != j:
                M = flats[i] @ np.linalg.inv(flats[j])
                squares = max(squares, np.max(np.abs(M @ M + one)))

    Bpinv = np.linalg.solve(chart.gramB, chart.B.T)
    cross = own = 0.0
    Ps = [poisson.bivector(chart.p, k) for k in (1, 2, 3)]
    for j in range(3):
        C = -Bpinv @ Ps[j]  # chart coordinates of X^j of the 9 coordinate functions
        for i in range(3):
            lhs = C.T @ forms.forms[i] @ C
            if i == j:
                own = max(own, np.max(np.abs(lhs + Ps[i])))
            else:
                cross = max(cross, np.max(np.abs(lhs - Ps[i])))

    I, J, K = metric.I, metric.J, metric.K
    quaternion = max(np.max(np.abs(M + one)) for M in (I @ I, J @ J, K @ K, I @ J @ K))
    w2, w3 = forms.w2, forms.w3
    contraction = np.max(np.abs(w2 - I.T @ w3))
    alt1, alt2 = alternative_metric_products(forms)
    return {
        "squares": float(squares),
        "cross_brackets": float(cross),
        "self_brackets": float(own),
        "quaternion": float(quaternion),
        "contraction": float(contraction),
        "symmetry": float(np.max(np.abs(metric.g - metric.g.T))),
        "alternative_g": float(max(np.max(np.abs(alt1 - metric.g)), np.max(np.abs(alt2 - metric.g)))),
    }


def frame_metric(p, O, chart=None, floor=poisson.PHI_FLOOR):
    """Pseudo-metric computed from the frame ``(e1, e2, e3) O`` and its cyclic permutations."""
    if chart is None:
        chart = leaf_chart(p, floor=floor)
    O = np.asarray(O, float)
    frames = [O @ cyclic_frame(k) for k in (1, 2, 3)]
    return leaf_metric(chart, restricted_forms(chart, frames, floor=floor))


def frame_independence_of_g(p, O, floor=poisson.PHI_FLOOR):
    """``max |g_O - g|`` for a frame change ``O``; zero for det +1, ``g_O = -g`` for det -1."""
    chart = leaf_chart(p, floor=floor)
    g = leaf_metric(chart, restricted_forms(chart, floor=floor)).g
    return float(np.max(np.abs(frame_metric(p, O, chart, floor).g - g)))
