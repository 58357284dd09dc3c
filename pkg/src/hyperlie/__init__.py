"""Hyper-Lie Poisson structure on su(2)^3.

Modules: :mod:`lie` (su(2) algebra), :mod:`poisson` (Poisson tensors, the
A tensor, casimirs, the set S), :mod:`leaf` (hypersymplectic leaves),
:mod:`flow` (Nahm's equations), :mod:`projection` (sl(2, C) orbits) and
:mod:`cli`.
"""
from ._backend import BACKEND
from .errors import HyperLieError

__version__ = "0.1.0"

__all__ = ["BACKEND", "HyperLieError", "__version__"]
