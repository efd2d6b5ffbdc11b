"""
Measurements on one spin of an entangled pair.

Two kinds of measurement are modelled:

1. Luder (non-selective) measurements on the joint density matrix. They leave
   the partial trace of the other spin untouched.
2. Von Neumann collapse of the pure joint state. The partner spin collapses
   along the constraint function, which on the spheres acts as a rotation
   (azimuth reflection) and a stretching towards the north pole.

All geometric laws are stated in the Schmidt frames: sphere 1 uses the basis
(x1^1, x1^2) and sphere 2 the basis (x2^1, x2^2) of ``entangle.SchmidtForm``.
``SchmidtFrames`` converts between those and the computational ("input")
frame.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
import numpy.typing as npt

from entangle_sphere import bloch, entangle, linalg
from entangle_sphere.bloch import Cartesian, MeasurementDirection, SpinPureState
from entangle_sphere.entangle import SchmidtForm, TwoQubitState
from entangle_sphere.errors import DegenerateImageError, SphereModelError
from entangle_sphere.linalg import ComplexMatrix2, ComplexMatrix4, ComplexVector2, ComplexVector4

# Squared norm below which a constraint image counts as the zero vector.
ZERO_IMAGE_TOL = 1e-20

GRID_COLUMNS = ("theta1", "phi1", "theta2", "phi2", "norm2", "axis_projection")


class Frame(str, Enum):
    SCHMIDT = "schmidt"
    INPUT = "input"


def _check_side(side: int) -> int:
    if side not in (1, 2):
        raise SphereModelError(f"side must be 1 or 2, got {side!r}")
    return side


@dataclass(frozen=True, eq=False)
class CollapseResult:
    """One outcome of a collapse measurement; ``None`` marks an undefined partner state."""

    outcome: int
    measured_side: int
    probability: float
    collapsed_first: ComplexVector2 | None
    collapsed_second: ComplexVector2 | None
    unnormalized_partner_norm2: float

    @property
    def impossible(self) -> bool:
        return self.collapsed_first is None or self.collapsed_second is None

    @property
    def joint_state(self) -> ComplexVector4 | None:
        if self.impossible:
            return None
        return linalg.tensor_vector(self.collapsed_first, self.collapsed_second)


@dataclass(frozen=True)
class ImagePoint:
    """Normalized image y of a sphere-1 state on sphere 2."""

    theta2: float
    phi2: float
    norm2: float
    axis_projection: float
    schmidt_overlap: float
    degenerate: bool = False

    @property
    def cartesian(self) -> Cartesian:
        if self.degenerate:
            return np.full(3, np.nan)
        return bloch.BlochPoint(1.0, self.theta2, self.phi2).cartesian


@dataclass(frozen=True)
class ConeResult:
    """Cone on sphere 2 that the equator of sphere 1 is mapped onto."""

    beta: float
    r: float
    max_residual: float = 0.0


@dataclass(frozen=True, eq=False)
class LineImage:
    y_plus: Cartesian
    y_minus: Cartesian
    pivot: Cartesian

    @property
    def cross_norm(self) -> float:
        """Zero iff the three points are collinear."""
        return float(np.linalg.norm(np.cross(self.y_plus - self.pivot, self.y_minus - self.pivot)))


@dataclass(frozen=True, eq=False)
class DeformationGrid:
    """Rows (theta1, phi1, theta2, phi2, norm2, axis_projection), theta-major."""

    rows: npt.NDArray[np.float64]
    r: float
    frame: Frame
    columns: tuple[str, ...] = GRID_COLUMNS

    @property
    def beta(self) -> float:
        return math.acos(self.r)


@dataclass(frozen=True, eq=False)
class SchmidtFrames:
    """Coordinates relative to the Schmidt bases of either sphere."""

    form: SchmidtForm

    def matrix(self, side: int) -> ComplexMatrix2:
        """Unitary whose columns are the Schmidt basis of ``side``."""
        basis = self.form.basis1 if _check_side(side) == 1 else self.form.basis2
        return np.column_stack(basis)

    def to_frame(self, side: int, vector: npt.ArrayLike) -> ComplexVector2:
        return linalg.dagger(self.matrix(side)) @ linalg.as_vector2(vector)

    def from_frame(self, side: int, coordinates: npt.ArrayLike) -> ComplexVector2:
        return self.matrix(side) @ linalg.as_vector2(coordinates)

    def direction_in_frame(self, side: int, direction: MeasurementDirection) -> MeasurementDirection:
        state = SpinPureState.from_vector(self.to_frame(side, direction.state.vector))
        return MeasurementDirection(state.theta, state.phi)

    def describe(self, side: int, vector: npt.ArrayLike, frame: Frame | str = Frame.SCHMIDT) -> SpinPureState:
        """Angles of a unit vector relative to the chosen frame of ``side``."""
        if Frame(frame) is Frame.SCHMIDT:
            vector = self.to_frame(side, vector)
        return SpinPureState.from_vector(vector)


def collapse(
    psi: TwoQubitState, direction: MeasurementDirection, side: int = 1
) -> tuple[CollapseResult, CollapseResult]:
    """
    Von Neumann collapse for both outcomes (+direction, -direction) on ``side``.

    The partner collapses to F(psi)(x) / |F(psi)(x)| and the outcome has
    probability |F(psi)(x)|^2.
    """
    _check_side(side)
    constraint = entangle.constraint_f12(psi) if side == 1 else entangle.constraint_f21(psi)
    results = []
    for outcome, measured in ((1, direction.state), (-1, direction.state.antipode())):
        x = measured.vector
        image = entangle.apply_constraint(constraint, x)
        norm2 = float(np.vdot(image, image).real)
        partner = None if norm2 <= ZERO_IMAGE_TOL else image / math.sqrt(norm2)
        first, second = (x, partner) if side == 1 else (partner, x)
        results.append(
            CollapseResult(
                outcome=outcome,
                measured_side=side,
                probability=0.0 if partner is None else norm2,
                collapsed_first=first,
                collapsed_second=second,
                unnormalized_partner_norm2=norm2,
            )
        )
    return results[0], results[1]


def collapse_on_first(
    psi: TwoQubitState, direction: MeasurementDirection
) -> tuple[CollapseResult, CollapseResult]:
    return collapse(psi, direction, side=1)


def luder(psi: TwoQubitState, direction: MeasurementDirection, side: int = 1) -> ComplexMatrix4:
    """(P (x) 1) D (P (x) 1) + ((1 - P) (x) 1) D ((1 - P) (x) 1), or the mirror for side 2."""
    _check_side(side)
    p = linalg.projector(direction.state.vector)
    q = linalg.IDENTITY2 - p
    if side == 1:
        kept, dropped = linalg.tensor_operator(p, linalg.IDENTITY2), linalg.tensor_operator(q, linalg.IDENTITY2)
    else:
        kept, dropped = linalg.tensor_operator(linalg.IDENTITY2, p), linalg.tensor_operator(linalg.IDENTITY2, q)
    d = psi.density
    return kept @ d @ kept + dropped @ d @ dropped


def luder_on_first(psi: TwoQubitState, direction: MeasurementDirection) -> ComplexMatrix4:
    return luder(psi, direction, side=1)


def remote_invariance_check(
    psi: TwoQubitState, direction: MeasurementDirection, measured: int = 1
) -> tuple[ComplexMatrix2, ComplexMatrix2]:
    """Partial trace of the unmeasured spin before and after a Luder measurement."""
    remote = 3 - _check_side(measured)
    before = linalg.partial_trace(psi.density, keep=remote)
    after = linalg.partial_trace(luder(psi, direction, side=measured), keep=remote)
    return before, after


def measured_side_prediction(
    psi: TwoQubitState,
    direction: MeasurementDirection,
    side: int = 1,
    schmidt: SchmidtForm | None = None,
) -> ComplexMatrix2:
    """
    Partial trace of the measured spin predicted by the single-spin rule.

    In its Schmidt frame the measured spin is D(r, 0, 0); the measurement
    projects that point on the direction (expressed in the same frame), and
    the result is rotated back to the computational frame.
    """
    form = schmidt or entangle.schmidt_decompose(psi)
    frames = SchmidtFrames(form)
    local = frames.direction_in_frame(side, direction)
    projected = bloch.axis_projection_literal(form.r, local)
    u = frames.matrix(side)
    return u @ bloch.density_from_bloch(projected) @ linalg.dagger(u)


def normalized_image(
    psi: TwoQubitState,
    x: SpinPureState,
    frame: Frame | str = Frame.SCHMIDT,
    schmidt: SchmidtForm | None = None,
) -> ImagePoint:
    """
    Where F12(psi) sends x on sphere 2, after normalization.

    ``frame`` selects whether the angles of x (input) and y (output) are
    relative to the Schmidt bases or to the computational bases.
    """
    frame = Frame(frame)
    frames = SchmidtFrames(schmidt or entangle.schmidt_decompose(psi))
    x_vector = frames.from_frame(1, x.vector) if frame is Frame.SCHMIDT else x.vector
    image = entangle.apply_constraint(entangle.constraint_f12(psi), x_vector)
    norm2 = float(np.vdot(image, image).real)
    if norm2 <= ZERO_IMAGE_TOL:
        return ImagePoint(math.nan, math.nan, norm2, math.nan, math.nan, degenerate=True)

    y = image / math.sqrt(norm2)
    coordinates = frames.to_frame(2, y)
    north, south = abs(coordinates[0]) ** 2, abs(coordinates[1]) ** 2
    angles = SpinPureState.from_vector(coordinates if frame is Frame.SCHMIDT else y)
    return ImagePoint(
        theta2=angles.theta,
        phi2=angles.phi,
        norm2=norm2,
        axis_projection=float(north - south),
        schmidt_overlap=float(math.sqrt(north)),
    )


def norm_law(r: float, theta1: float) -> float:
    """|F12(psi) x|^2 = (1 + r cos theta1) / 2."""
    return (1 + r * math.cos(theta1)) / 2


def axis_law(r: float, theta1: float) -> float:
    """y . x2^1 = (r + cos theta1) / (1 + r cos theta1)."""
    return (r + math.cos(theta1)) / (1 + r * math.cos(theta1))


def overlap_law(r: float, theta1: float) -> float:
    """|<y, x2^1>| = sqrt((1 + r) / (1 + r cos theta1)) |<x, x1^1>|."""
    return math.sqrt((1 + r) / (1 + r * math.cos(theta1))) * math.cos(theta1 / 2)


def cone_of_equator(psi: TwoQubitState, samples: int = 100) -> ConeResult:
    form = entangle.schmidt_decompose(psi)
    residual = 0.0
    for phi in np.linspace(0.0, 2 * math.pi, samples, endpoint=False):
        image = normalized_image(psi, SpinPureState(math.pi / 2, float(phi)), schmidt=form)
        residual = max(residual, abs(image.axis_projection - form.r))
    return ConeResult(beta=math.acos(form.r), r=form.r, max_residual=residual)


def line_image_check(psi: TwoQubitState, x: SpinPureState, schmidt: SchmidtForm | None = None) -> LineImage:
    """Images of x and its antipode, with the pivot u(r, 0, 0) of sphere 2 (Schmidt frame)."""
    form = schmidt or entangle.schmidt_decompose(psi)
    if form.r >= 1 - entangle.PRODUCT_TOL:
        raise DegenerateImageError("line images need an entangled state (r < 1)")
    plus = normalized_image(psi, x, schmidt=form)
    minus = normalized_image(psi, x.antipode(), schmidt=form)
    return LineImage(plus.cartesian, minus.cartesian, np.array([0.0, 0.0, form.r]))


def orthogonality_image(psi: TwoQubitState, x: SpinPureState, schmidt: SchmidtForm | None = None) -> complex:
    """<F12(psi) psi_u, F12(psi) psi_-u> for x = psi_u given in the Schmidt frame of sphere 1."""
    frames = SchmidtFrames(schmidt or entangle.schmidt_decompose(psi))
    f12 = entangle.constraint_f12(psi)
    plus = entangle.apply_constraint(f12, frames.from_frame(1, x.vector))
    minus = entangle.apply_constraint(f12, frames.from_frame(1, x.antipode().vector))
    return linalg.inner(plus, minus)


def orthogonality_closed_form(r: float, theta1: float) -> float:
    """|<F12(psi) psi_u, F12(psi) psi_-u>| = r sin(theta1) / 2."""
    return r * math.sin(theta1) / 2


def sphere_deformation_grid(
    psi: TwoQubitState,
    n_theta: int,
    n_phi: int,
    frame: Frame | str = Frame.SCHMIDT,
) -> DeformationGrid:
    """
    Images of a regular (theta1, phi1) grid of sphere 1.

    theta1 runs over linspace(0, pi, n_theta) (both poles included), phi1
    over 2 pi k / n_phi. Degenerate rows (zero image) carry NaN angles and
    axis projection.
    """
    if n_theta < 2 or n_phi < 1:
        raise SphereModelError(f"grid needs n_theta >= 2 and n_phi >= 1, got {n_theta}x{n_phi}")
    frame = Frame(frame)
    form = entangle.schmidt_decompose(psi)
    rows = np.empty((n_theta * n_phi, len(GRID_COLUMNS)))
    thetas = np.linspace(0.0, math.pi, n_theta)
    phis = 2 * math.pi * np.arange(n_phi) / n_phi
    for i, theta in enumerate(thetas):
        for k, phi in enumerate(phis):
            image = normalized_image(psi, SpinPureState(float(theta), float(phi)), frame=frame, schmidt=form)
            rows[i * n_phi + k] = (theta, phi, image.theta2, image.phi2, image.norm2, image.axis_projection)
    return DeformationGrid(rows=rows, r=form.r, frame=frame)
