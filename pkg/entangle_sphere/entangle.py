"""
Constraint functions of a two-spin pure state and its Schmidt diagonal form.

A state |psi> = sum_ij lambda_ij |e1^i> (x) |e2^j> defines two conjugate-linear
maps

    F12(psi): x1 -> sum_ij lambda_ij <x1, e1^i> |e2^j>
    F21(psi): x2 -> sum_ij lambda_ij <x2, e2^j> |e1^i>

sending the state one spin collapses to onto the state the other spin
collapses to. Their compositions are the partial traces, and the Schmidt
form with parameter r in [0, 1] follows from the eigenbasis of D1(psi).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import numpy.typing as npt

from entangle_sphere import linalg
from entangle_sphere.errors import DirectionMismatchError, NotUnitError, SphereModelError
from entangle_sphere.linalg import (
    ALGEBRAIC_TOL,
    EIGEN_TOL,
    ComplexMatrix2,
    ComplexMatrix4,
    ComplexVector2,
    ComplexVector4,
)

# At r >= 1 - PRODUCT_TOL the second Schmidt vector of spin 2 is taken as the
# orthogonal completion instead of the (vanishing) rescaled image.
PRODUCT_TOL = 1e-10

Basis = tuple[ComplexVector2, ComplexVector2]


def _as_basis(vectors: npt.ArrayLike, name: str) -> npt.NDArray[np.complex128]:
    rows = linalg.as_matrix2(vectors)
    gram = rows.conj() @ rows.T
    if linalg.max_abs(gram - linalg.IDENTITY2) > ALGEBRAIC_TOL:
        raise SphereModelError(f"{name} must be an orthonormal pair")
    return rows


@dataclass(frozen=True, eq=False)
class TwoQubitState:
    """
    Pure state of the pair, stored as the coefficient grid lambda_ij over
    two orthonormal bases (rows of ``basis1`` and ``basis2``).
    """

    lambdas: ComplexMatrix2
    basis1: ComplexMatrix2 = field(default_factory=lambda: linalg.IDENTITY2.copy())
    basis2: ComplexMatrix2 = field(default_factory=lambda: linalg.IDENTITY2.copy())

    def __post_init__(self) -> None:
        lambdas = linalg.as_matrix2(self.lambdas)
        norm2 = float(np.sum(np.abs(lambdas) ** 2))
        if abs(norm2 - 1.0) > ALGEBRAIC_TOL:
            raise NotUnitError(f"state must have unit norm, got squared norm {norm2!r}")
        object.__setattr__(self, "lambdas", lambdas)
        object.__setattr__(self, "basis1", _as_basis(self.basis1, "basis1"))
        object.__setattr__(self, "basis2", _as_basis(self.basis2, "basis2"))

    @classmethod
    def from_vector(cls, vector: npt.ArrayLike) -> TwoQubitState:
        """State with amplitudes on |00>, |01>, |10>, |11> (computational bases)."""
        return cls(linalg.as_vector4(vector).reshape(2, 2))

    @classmethod
    def normalized(cls, amplitudes: npt.ArrayLike) -> TwoQubitState:
        return cls.from_amplitudes(amplitudes, normalize=True)

    @classmethod
    def from_amplitudes(cls, amplitudes: npt.ArrayLike, normalize: bool = False) -> TwoQubitState:
        vector = linalg.as_vector4(amplitudes)
        if normalize:
            norm = float(np.linalg.norm(vector))
            if norm == 0.0:
                raise NotUnitError("cannot normalize the zero vector")
            vector = vector / norm
        return cls.from_vector(vector)

    @classmethod
    def singlet(cls) -> TwoQubitState:
        s = 1 / math.sqrt(2)
        return cls.from_amplitudes([0, s, -s, 0])

    @classmethod
    def product(cls, a: npt.ArrayLike, b: npt.ArrayLike) -> TwoQubitState:
        a = linalg.require_unit(linalg.as_vector2(a))
        b = linalg.require_unit(linalg.as_vector2(b))
        return cls.from_amplitudes(linalg.tensor_vector(a, b))

    @property
    def vector(self) -> ComplexVector4:
        """Amplitudes in the computational basis."""
        total = np.zeros(4, dtype=np.complex128)
        for i in range(2):
            for j in range(2):
                total += self.lambdas[i, j] * linalg.tensor_vector(self.basis1[i], self.basis2[j])
        return total

    @property
    def coefficients(self) -> ComplexMatrix2:
        """Computational-basis coefficient grid C_ab = <a b | psi>."""
        return self.vector.reshape(2, 2)

    @property
    def density(self) -> ComplexMatrix4:
        v = self.vector
        return np.outer(v, v.conj())

    def expanded_in(self, basis1: npt.ArrayLike, basis2: npt.ArrayLike) -> TwoQubitState:
        """The same vector re-expanded over other orthonormal bases."""
        e1 = _as_basis(basis1, "basis1")
        e2 = _as_basis(basis2, "basis2")
        lambdas = e1.conj() @ self.coefficients @ e2.conj().T
        return TwoQubitState(lambdas, e1, e2)


class Direction(str, Enum):
    FIRST_TO_SECOND = "1->2"
    SECOND_TO_FIRST = "2->1"


@dataclass(frozen=True, eq=False)
class ConstraintMap:
    """Conjugate-linear map x -> M conj(x) in the computational frame."""

    matrix: ComplexMatrix2
    direction: Direction

    def __call__(self, x: npt.ArrayLike) -> ComplexVector2:
        return apply_constraint(self, x)


@dataclass(frozen=True, eq=False)
class SchmidtForm:
    """psi = c1 x1^1 (x) x2^1 + c2 x1^2 (x) x2^2 with c = (sqrt((1+r)/2), sqrt((1-r)/2))."""

    r: float
    basis1: Basis
    basis2: Basis

    def __post_init__(self) -> None:
        if not 0.0 <= self.r <= 1.0:
            raise SphereModelError(f"entanglement parameter must lie in [0, 1], got {self.r!r}")
        for name in ("basis1", "basis2"):
            rows = np.array(getattr(self, name), dtype=np.complex128)
            if linalg.max_abs(rows.conj() @ rows.T - linalg.IDENTITY2) > EIGEN_TOL:
                raise SphereModelError(f"Schmidt {name} is not orthonormal")

    @property
    def coefficients(self) -> tuple[float, float]:
        return math.sqrt((1 + self.r) / 2), math.sqrt((1 - self.r) / 2)


def constraint_f12(psi: TwoQubitState) -> ConstraintMap:
    """F12(psi) built term by term from the expansion of psi."""
    # <x1, e1^i> = (e1^i)^T conj(x1), so each term contributes e2^j (e1^i)^T
    matrix = np.einsum("ij,jb,ia->ba", psi.lambdas, psi.basis2, psi.basis1)
    return ConstraintMap(matrix, Direction.FIRST_TO_SECOND)


def constraint_f21(psi: TwoQubitState) -> ConstraintMap:
    """F21(psi) built term by term from the expansion of psi."""
    matrix = np.einsum("ij,ia,jb->ab", psi.lambdas, psi.basis1, psi.basis2)
    return ConstraintMap(matrix, Direction.SECOND_TO_FIRST)


def apply_constraint(constraint: ConstraintMap, x: npt.ArrayLike) -> ComplexVector2:
    return constraint.matrix @ np.conj(linalg.as_vector2(x))


def compose_constraints(outer: ConstraintMap, inner: ConstraintMap) -> ComplexMatrix2:
    """
    Matrix of the linear map outer o inner.

    Two conjugations cancel: outer(inner(x)) = M_outer conj(M_inner) x.
    F21 o F12 is D1(psi) and F12 o F21 is D2(psi).
    """
    if outer.direction == inner.direction:
        raise DirectionMismatchError(
            f"cannot compose {outer.direction.value} after {inner.direction.value}"
        )
    return outer.matrix @ np.conj(inner.matrix)


def adjoint_relation_check(
    psi: TwoQubitState, x1: npt.ArrayLike, x2: npt.ArrayLike
) -> tuple[complex, complex]:
    """Both sides of <F12(psi) x1, x2> = <x1, F21(psi) x2>*."""
    lhs = linalg.inner(apply_constraint(constraint_f12(psi), x1), x2)
    rhs = linalg.inner(x1, apply_constraint(constraint_f21(psi), x2)).conjugate()
    return lhs, rhs


def _unit(vector: ComplexVector2) -> ComplexVector2:
    # scaled by the image norm: 1 - r is only known to eigenvalue round-off
    return vector / np.linalg.norm(vector)


def _partner_second(image: ComplexVector2, partner_first: ComplexVector2) -> ComplexVector2:
    # the exact image is orthogonal to x2^1; drop the round-off along it before scaling
    residual = image - linalg.inner(partner_first, image) * partner_first
    if not np.any(residual):
        return linalg.orthogonal_complement(partner_first)
    return _unit(residual)


def _gap(values: tuple[float, float]) -> float:
    # lambda_max - lambda_min, equal to 2 lambda_max - 1 at unit trace
    return min(max(values[0] - values[1], 0.0), 1.0)


def entanglement_parameter(psi: TwoQubitState) -> float:
    """r = 2 lambda_max(D1) - 1, clamped to [0, 1]."""
    return _gap(linalg.hermitian_eigen2(linalg.partial_trace(psi.density, keep=1)).values)


def schmidt_with_basis(psi: TwoQubitState, basis1: npt.ArrayLike, r: float | None = None) -> SchmidtForm:
    """
    Schmidt form from a given eigenbasis (x1^1, x1^2) of D1(psi).

    x2^k = F12(x1^k) / |F12(x1^k)|, which equals sqrt(2 / (1 +- r)) F12(x1^k);
    at r = 1 the second image vanishes and x2^2 is the orthogonal completion.
    """
    first, second = _as_basis(basis1, "basis1")
    if r is None:
        r = entanglement_parameter(psi)
    f12 = constraint_f12(psi)
    partner_first = _unit(apply_constraint(f12, first))
    if r >= 1 - PRODUCT_TOL:
        partner_second = linalg.orthogonal_complement(partner_first)
    else:
        partner_second = _partner_second(apply_constraint(f12, second), partner_first)
    return SchmidtForm(r, (first, second), (partner_first, partner_second))


def schmidt_decompose(psi: TwoQubitState) -> SchmidtForm:
    d1 = linalg.partial_trace(psi.density, keep=1)
    eigen = linalg.hermitian_eigen2(d1)
    return schmidt_with_basis(psi, np.array(eigen.vectors), _gap(eigen.values))


def reconstruct_state(form: SchmidtForm) -> TwoQubitState:
    c1, c2 = form.coefficients
    vector = c1 * linalg.tensor_vector(form.basis1[0], form.basis2[0]) + c2 * linalg.tensor_vector(
        form.basis1[1], form.basis2[1]
    )
    return TwoQubitState.from_amplitudes(vector, normalize=True)


def parametrized_schmidt_basis(theta: float, phi: float) -> ComplexMatrix2:
    """
    Basis x1^1 = (cos(t/2) e^{-i p/2}, sin(t/2) e^{i p/2}),
    x1^2 = (-i sin(t/2) e^{-i p/2}, i cos(t/2) e^{i p/2}).

    It diagonalizes D(r, theta, phi) into diag((1 + r)/2, (1 - r)/2).
    """
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    left, right = np.exp(-0.5j * phi), np.exp(0.5j * phi)
    return np.array([[c * left, s * right], [-1j * s * left, 1j * c * right]], dtype=np.complex128)
