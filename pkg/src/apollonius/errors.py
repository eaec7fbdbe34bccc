"""Typed errors shared across the engine.

Diagnostic exceptions double as values: ``moduli.config_check`` returns
instances of :class:`CollinearCenters`, :class:`TangentPair`, or
:class:`DegenerateInput` without raising, so callers may either inspect
or re-raise them.
"""

from __future__ import annotations


class ApolloniusError(Exception):
    """Base class for every error raised by this package."""


# ---------------------------------------------------------------- fields


class FieldMismatch(ApolloniusError):
    """Arithmetic attempted between elements of incompatible towers."""


class ZeroRadicand(ApolloniusError):
    """Attempt to adjoin the square root of zero."""


class NoEmbedding(ApolloniusError):
    """Sign requested for a field with no real embedding data."""


class ZeroArgument(ApolloniusError):
    """An argument that must be nonzero was zero."""


class ZeroScalar(ApolloniusError):
    """A scaling element that must be nonzero was zero."""


# ---------------------------------------------------------------- moduli


class DegenerateCircle(ApolloniusError):
    """Operation requires c0 != 0 but the circle is degenerate."""


class UnderDetermined(ApolloniusError):
    """The three incidence conditions do not determine a unique circle."""


class SquareRootUnavailable(ApolloniusError):
    """A radius was requested but r^2 is not a square in the field."""


class PoleAtT(ApolloniusError):
    """Parametrization evaluated at a pole (1 + t^2 = 0)."""


# ---------------------------------------------------------------- solver


class CollinearCenters(ApolloniusError):
    """The three centers are collinear (delta = 0)."""


class TangentPair(ApolloniusError):
    """Two of the input circles are mutually tangent."""

    def __init__(self, i: int, j: int):
        super().__init__(f"input circles {i} and {j} are tangent")
        self.i = i
        self.j = j


class DegenerateInput(ApolloniusError):
    """An input object is degenerate (line-circle or repeated input)."""


class InfiniteRadius(ApolloniusError):
    """A quadratic's leading coefficient vanished: a tangent line, not a
    circle, solves this configuration."""


class ConcentricDegeneracy(ApolloniusError):
    """Tangency point undefined: solution concentric with an input."""


class DegenerateSolution(ApolloniusError):
    """A solution circle is degenerate where a center is required."""


# ----------------------------------------------------------- local index


class ZeroIndex(ApolloniusError):
    """Local index is zero: the intersection is not transverse there."""


# -------------------------------------------------------------- zerodim


class SolutionsAtInfinity(ApolloniusError):
    """The projective intersection meets the plane c0 = 0."""


class NotZeroDimensional(ApolloniusError):
    """The intersection scheme is not finite."""


class DegenerateForm(ApolloniusError):
    """A bilinear form that must be nondegenerate is singular."""


# -------------------------------------------------------------- duality


class DegenerateMerge(ApolloniusError):
    """The t = 0 specialization has a repeated root; perturb the
    configuration and retry."""
