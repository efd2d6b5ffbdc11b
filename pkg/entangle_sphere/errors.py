"""Exceptions raised by the sphere model library.

All of them derive from ``SphereModelError`` (itself a ``ValueError``) so the
command-line runner can report any precondition violation as an input error.
"""

from __future__ import annotations


class SphereModelError(ValueError):
    """Base class for precondition violations."""


class ShapeError(SphereModelError):
    """Array input has the wrong shape."""


class NonFiniteError(SphereModelError):
    """Array input contains NaN or infinity."""


class NotHermitianError(SphereModelError):
    """Matrix is not Hermitian within tolerance."""


class NotDensityError(SphereModelError):
    """Matrix is not a valid density matrix (trace 1, PSD)."""


class NotUnitError(SphereModelError):
    """Vector or state is not normalized."""


class InteriorPointError(SphereModelError):
    """A surface (pure-state) point was required."""


class DirectionMismatchError(SphereModelError):
    """Constraint maps were composed in an incompatible order."""


class DegenerateImageError(SphereModelError):
    """A geometric construction needs a non-degenerate state (r < 1)."""
