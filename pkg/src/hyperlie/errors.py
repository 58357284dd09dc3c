"""Exceptions raised by the hyperlie numerics."""


class HyperLieError(Exception):
    """Base class for all library errors."""


class SingularPoint(HyperLieError):
    """The point lies on (or too close to) the hypersurface where Phi vanishes."""

    def __init__(self, phi, floor):
        super().__init__(f"|Phi| = {abs(phi):.3e} does not exceed the floor {floor:.1e}")
        self.phi = phi
        self.floor = floor


class NotInS(HyperLieError):
    """The point does not satisfy the casimir-level description of S."""


class ZeroPoint(HyperLieError):
    """The origin, where no standard frame exists."""


class NoSolution(HyperLieError):
    """A linear system that should be solvable left a residual above tolerance."""


class DegenerateBasis(HyperLieError):
    """Leaf generators are numerically rank deficient."""


class DegenerateRestriction(HyperLieError):
    """A restricted bivector on a leaf chart is numerically singular."""


class RankDeficient(HyperLieError):
    """An ad-representation solve failed."""


class PoleReached(HyperLieError):
    """The closed-form solution is evaluated at its pole."""


class StepSizeUnderflow(HyperLieError):
    """The adaptive integrator could not make progress."""
