"""Seeded random points for the verification suites.

Every sample index gets its own child of a ``SeedSequence`` so a point does
not depend on how many points were drawn before it.
"""
import numpy as np

from . import poisson
from .lie import random_rotation

MIN_ABS_PHI = 0.1
REGIONS = ("plus", "minus", "both")


def point_rng(seed, stream, index):
    """Generator for sample ``index`` of ``stream``; equal to the spawned child."""
    ss = np.random.SeedSequence(int(seed) & 0xFFFFFFFFFFFFFFFF, spawn_key=(int(stream), int(index)))
    return np.random.default_rng(ss)


def child_rngs(seed, n, stream=0):
    return [point_rng(seed, stream, i) for i in range(n)]


def random_M_o_point(rng, region="both", min_abs_phi=MIN_ABS_PHI):
    """Gaussian point with ``|Phi| > min_abs_phi`` in the requested region.

    ``minus`` points are made by swapping ``b`` and ``c`` of a ``plus`` point.
    """
    if region not in REGIONS:
        raise ValueError(f"region must be one of {REGIONS}")
    while True:
        p = rng.normal(size=(3, 3))
        ph = poisson.phi(p)
        if abs(ph) > min_abs_phi:
            break
    want = {"plus": 1.0, "minus": -1.0}.get(region)
    if want is None:
        want = 1.0 if rng.random() < 0.5 else -1.0
    if np.sign(ph) != want:
        p = p[[0, 2, 1]]
    return p


def standard_S_point(r, lam):
    """``(sqrt(lam^2 + r^2) e1, lam e2, lam e3)``."""
    return np.diag([np.sqrt(lam ** 2 + r ** 2), lam, lam])


def random_S_point(rng, r, lam, frame_change=True):
    """A point of ``S_O`` (``r > 0``) or ``S_0`` (``r = 0``) in general position.

    Built from the standard form by a random adjoint rotation and, optionally,
    a random oriented frame change.
    """
    p = poisson.rotate_point(standard_S_point(r, lam), random_rotation(rng))
    if frame_change:
        p = poisson.change_frame(p, random_rotation(rng).T)
    return p


def random_unit(rng, dim=3):
    v = rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_complex(rng):
    return rng.normal(size=3) + 1j * rng.normal(size=3)
