"""
The sphere model of a single spin 1/2.

- BlochPoint: a point u(r, theta, phi) of the closed unit ball
- SpinPureState: a ray state on the surface
- MeasurementDirection: a spin measurement direction u(1, theta, phi)

Luder's formula on a density state is, on the sphere, the orthogonal
projection of the state's point on the measurement axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from entangle_sphere import linalg
from entangle_sphere.errors import InteriorPointError, SphereModelError
from entangle_sphere.linalg import ALGEBRAIC_TOL, ComplexMatrix2, ComplexVector2

TWO_PI = 2 * math.pi

Cartesian = npt.NDArray[np.float64]


def _wrap_azimuth(phi: float) -> float:
    wrapped = math.fmod(phi, TWO_PI)
    if wrapped < 0:
        wrapped += TWO_PI
    # fmod of a tiny negative number can land exactly on 2*pi
    return 0.0 if wrapped >= TWO_PI else wrapped


def _check_polar(theta: float) -> float:
    if not math.isfinite(theta) or not 0.0 <= theta <= math.pi:
        raise SphereModelError(f"polar angle must lie in [0, pi], got {theta!r}")
    return float(theta)


def _check_azimuth(phi: float) -> float:
    if not math.isfinite(phi):
        raise SphereModelError(f"azimuth must be finite, got {phi!r}")
    return _wrap_azimuth(float(phi))


@dataclass(frozen=True)
class BlochPoint:
    """Point u(r, theta, phi) of the unit ball; canonical phi = 0 at the poles and center."""

    r: float
    theta: float = 0.0
    phi: float = 0.0

    def __post_init__(self) -> None:
        if not math.isfinite(self.r) or not 0.0 <= self.r <= 1.0:
            raise SphereModelError(f"radius must lie in [0, 1], got {self.r!r}")
        theta = _check_polar(self.theta)
        phi = _check_azimuth(self.phi)
        if self.r == 0.0:
            theta = 0.0
        if theta in (0.0, math.pi):
            phi = 0.0
        object.__setattr__(self, "r", float(self.r))
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "phi", phi)

    @classmethod
    def from_cartesian(cls, vector: npt.ArrayLike) -> BlochPoint:
        x, y, z = (float(c) for c in np.asarray(vector, dtype=np.float64))
        r = math.sqrt(x * x + y * y + z * z)
        if r > 1.0 + ALGEBRAIC_TOL:
            raise SphereModelError(f"point lies outside the unit ball (|u| = {r!r})")
        if r == 0.0:
            return cls(0.0)
        theta = math.atan2(math.hypot(x, y), z)
        phi = math.atan2(y, x)
        return cls(min(r, 1.0), theta, phi)

    @property
    def cartesian(self) -> Cartesian:
        sin_theta = math.sin(self.theta)
        return self.r * np.array(
            [sin_theta * math.cos(self.phi), sin_theta * math.sin(self.phi), math.cos(self.theta)]
        )

    @property
    def on_surface(self) -> bool:
        return abs(self.r - 1.0) <= ALGEBRAIC_TOL

    def isclose(self, other: BlochPoint, tol: float = ALGEBRAIC_TOL) -> bool:
        """Compare positions (not angle triples, which are singular at the poles)."""
        return float(np.max(np.abs(self.cartesian - other.cartesian))) <= tol


@dataclass(frozen=True)
class SpinPureState:
    """Ray state with amplitudes (cos(theta/2) e^{-i phi/2}, sin(theta/2) e^{i phi/2})."""

    theta: float
    phi: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "theta", _check_polar(self.theta))
        object.__setattr__(self, "phi", _check_azimuth(self.phi))

    @classmethod
    def from_vector(cls, vector: npt.ArrayLike) -> SpinPureState:
        v = linalg.require_unit(linalg.as_vector2(vector), linalg.EIGEN_TOL)
        theta = 2 * math.atan2(abs(v[1]), abs(v[0]))
        if abs(v[0]) == 0.0 or abs(v[1]) == 0.0:
            return cls(theta, 0.0)
        return cls(theta, float(np.angle(v[1]) - np.angle(v[0])))

    @classmethod
    def from_degrees(cls, theta: float, phi: float = 0.0) -> SpinPureState:
        return cls(math.radians(theta), math.radians(phi))

    @property
    def vector(self) -> ComplexVector2:
        half = self.theta / 2
        return np.array(
            [
                math.cos(half) * np.exp(-0.5j * self.phi),
                math.sin(half) * np.exp(0.5j * self.phi),
            ],
            dtype=np.complex128,
        )

    @property
    def point(self) -> BlochPoint:
        return BlochPoint(1.0, self.theta, self.phi)

    def antipode(self) -> SpinPureState:
        """The orthogonal ray state psi(pi - theta, phi + pi)."""
        return SpinPureState(math.pi - self.theta, self.phi + math.pi)


@dataclass(frozen=True)
class MeasurementDirection:
    """Spin measurement along u(1, theta, phi)."""

    theta: float
    phi: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "theta", _check_polar(self.theta))
        object.__setattr__(self, "phi", _check_azimuth(self.phi))

    @classmethod
    def from_axis(cls, vector: npt.ArrayLike) -> MeasurementDirection:
        axis = np.asarray(vector, dtype=np.float64)
        norm = float(np.linalg.norm(axis))
        if norm == 0.0 or not math.isfinite(norm):
            raise SphereModelError("measurement axis must be a non-zero finite vector")
        point = BlochPoint.from_cartesian(axis / norm)
        return cls(point.theta, point.phi)

    @classmethod
    def from_degrees(cls, theta: float, phi: float = 0.0) -> MeasurementDirection:
        return cls(math.radians(theta), math.radians(phi))

    @property
    def axis(self) -> Cartesian:
        return BlochPoint(1.0, self.theta, self.phi).cartesian

    @property
    def state(self) -> SpinPureState:
        """The ray state selected by the '+' outcome."""
        return SpinPureState(self.theta, self.phi)

    def opposite(self) -> MeasurementDirection:
        return MeasurementDirection(math.pi - self.theta, self.phi + math.pi)


@dataclass(frozen=True, eq=False)
class LittleSphere:
    """Sphere of points a state can be projected to by some measurement."""

    center: Cartesian
    radius: float

    def contains(self, point: BlochPoint, tol: float = ALGEBRAIC_TOL) -> bool:
        return abs(float(np.linalg.norm(point.cartesian - self.center)) - self.radius) <= tol


def density_from_bloch(point: BlochPoint) -> ComplexMatrix2:
    """D(r, theta, phi) = (1/2)[[1 + r cos t, r sin t e^{-i phi}], [r sin t e^{i phi}, 1 - r cos t]]."""
    r, theta, phi = point.r, point.theta, point.phi
    z = r * math.cos(theta)
    off = r * math.sin(theta) * np.exp(1j * phi)
    return 0.5 * np.array([[1 + z, np.conj(off)], [off, 1 - z]], dtype=np.complex128)


def bloch_from_density(density: npt.ArrayLike) -> BlochPoint:
    d = linalg.require_density2(density)
    coherence = complex(d[1, 0])
    vector = (2 * coherence.real, 2 * coherence.imag, float((d[0, 0] - d[1, 1]).real))
    return BlochPoint.from_cartesian(vector)


def luder_single(density: npt.ArrayLike, direction: MeasurementDirection) -> ComplexMatrix2:
    """Non-selective measurement P D P + (1 - P) D (1 - P)."""
    d = linalg.require_density2(density)
    p = linalg.projector(direction.state.vector)
    q = linalg.IDENTITY2 - p
    return p @ d @ p + q @ d @ q


def geometric_projection(point: BlochPoint, direction: MeasurementDirection) -> BlochPoint:
    """Orthogonal projection (u . a) a of the state's point on the measurement axis."""
    axis = direction.axis
    return BlochPoint.from_cartesian(float(np.dot(point.cartesian, axis)) * axis)


def axis_projection_literal(s: float, direction: MeasurementDirection) -> BlochPoint:
    """
    Branch form of the projection for a state u(s, 0, .) on the north-south axis.

    For theta in [0, pi/2] the image is u(s cos theta, theta, phi); otherwise
    it is u(s cos(pi - theta), pi - theta, phi + pi).
    """
    theta, phi = direction.theta, direction.phi
    if theta <= math.pi / 2:
        return BlochPoint(s * math.cos(theta), theta, phi)
    flipped = math.pi - theta
    return BlochPoint(s * math.cos(flipped), flipped, phi + math.pi)


def reachable_sphere(point: BlochPoint) -> LittleSphere:
    """Little sphere with the state as north pole and the ball's center as south pole."""
    u = point.cartesian
    return LittleSphere(center=u / 2, radius=float(np.linalg.norm(u)) / 2)


def overlap_from_points(p: BlochPoint, q: BlochPoint) -> float:
    """|<psi_p, psi_q>|^2 = (1 + p . q) / 2 for two pure-state points."""
    for point in (p, q):
        if not point.on_surface:
            raise InteriorPointError(f"overlap_from_points needs surface points, got r = {point.r!r}")
    return (1.0 + float(np.dot(p.cartesian, q.cartesian))) / 2


def bloch_vector(vector: npt.ArrayLike) -> Cartesian:
    """Cartesian point of the ray through a unit vector (x, y, z from |v><v|)."""
    v = linalg.as_vector2(vector)
    coherence = complex(v[1] * np.conj(v[0]))
    return np.array([2 * coherence.real, 2 * coherence.imag, float(abs(v[0]) ** 2 - abs(v[1]) ** 2)])
