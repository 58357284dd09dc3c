"""Small exact primitives for su(2), its adjoint picture and su(2) complexified.

Elements of su(2) are length-3 real arrays of coefficients in an orthonormal
basis with ``[e1, e2] = e3`` (cyclic).  With that normalization the invariant
inner product is the coefficient dot product and the bracket is the cross
product.  Complex elements (of sl(2, C)) are length-3 complex arrays.

Frames are 3x3 orthogonal matrices with determinant +1.  They act on row
triples ``(a, b, c)`` by right multiplication, ``(a', b', c') = (a, b, c) O``;
when a point is stored as a 3x3 array whose rows are ``a, b, c`` that reads
``p' = O.T @ p``.
"""
import numpy as np

E1 = np.array([1.0, 0.0, 0.0])
E2 = np.array([0.0, 1.0, 0.0])
E3 = np.array([0.0, 0.0, 1.0])
BASIS = np.eye(3)

# (e1, e2, e3) C = (e2, e3, e1)
CYCLIC = np.array([[0.0, 0.0, 1.0],
                   [1.0, 0.0, 0.0],
                   [0.0, 1.0, 0.0]])

FRAME_TOL = 1e-12


def bracket(x, y):
    """Lie bracket ``[x, y]``; bilinear, antisymmetric, Jacobi."""
    return np.cross(x, y)


def inner(x, y):
    """Positive invariant inner product (orthonormal basis gives the dot product)."""
    return float(np.dot(x, y))


def hat(x):
    """Matrix of ``ad_x``: ``hat(x) @ y == bracket(x, y)``."""
    x1, x2, x3 = x
    return np.array([[0.0, -x3, x2],
                     [x3, 0.0, -x1],
                     [-x2, x1, 0.0]])


def vee(m):
    """Inverse of :func:`hat` on antisymmetric matrices."""
    return np.array([m[2, 1], m[0, 2], m[1, 0]])


def adjoint_rotation(xi):
    """Return ``exp(ad_xi)`` as an SO(3) matrix (Rodrigues formula).

    The small-angle branch uses the Taylor coefficients so the result stays
    orthogonal to machine precision for tiny ``xi``.
    """
    xi = np.asarray(xi, dtype=float)
    theta2 = float(xi @ xi)
    K = hat(xi)
    if theta2 < 1e-16:
        s = 1.0 - theta2 / 6.0
        c = 0.5 - theta2 / 24.0
    else:
        theta = np.sqrt(theta2)
        s = np.sin(theta) / theta
        c = (1.0 - np.cos(theta)) / theta2
    return np.eye(3) + s * K + c * (K @ K)


def is_frame(o, tol=FRAME_TOL):
    o = np.asarray(o, dtype=float)
    if o.shape != (3, 3):
        return False
    return (np.max(np.abs(o.T @ o - np.eye(3))) <= tol
            and abs(np.linalg.det(o) - 1.0) <= tol * 10)


def as_frame(o, tol=FRAME_TOL):
    """Validate ``o`` as an orientation preserving orthogonal matrix."""
    o = np.array(o, dtype=float)
    if not is_frame(o, tol):
        raise ValueError("not an SO(3) matrix within tolerance")
    o.setflags(write=False)
    return o


def cyclic_frame(index):
    """Frame matrix relating F to F_index (index 1, 2 or 3)."""
    if index not in (1, 2, 3):
        raise ValueError(f"frame index must be 1, 2 or 3, got {index!r}")
    return np.linalg.matrix_power(CYCLIC, index - 1)


def random_rotation(rng, orientation=1):
    """Haar-distributed orthogonal matrix with the requested determinant."""
    q, r = np.linalg.qr(rng.standard_normal((3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) * orientation < 0:
        q[:, 0] = -q[:, 0]
    return q


def orthonormalize(o):
    """Project a nearly orthogonal matrix back onto O(3) (polar factor)."""
    u, _, vt = np.linalg.svd(o)
    return u @ vt


def complexify(re, im=None):
    re = np.asarray(re, dtype=float)
    im = np.zeros(3) if im is None else np.asarray(im, dtype=float)
    return re + 1j * im


def complex_bracket(z1, z2):
    """Complex-bilinear extension of :func:`bracket`."""
    return np.cross(np.asarray(z1, dtype=complex), np.asarray(z2, dtype=complex))


def complex_pairing(z1, z2):
    """Complex-bilinear (not Hermitian) extension of :func:`inner`."""
    return complex(np.sum(np.asarray(z1, dtype=complex) * np.asarray(z2, dtype=complex)))
