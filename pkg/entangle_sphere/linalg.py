"""
Exact-size complex linear algebra for one and two spin 1/2.

Vectors and matrices are plain ``numpy`` arrays of dtype ``complex128`` with
fixed shapes (2,), (4,), (2, 2) and (4, 4). The ``as_*`` helpers are the
entry point for any array a public operation accepts: they coerce, check the
shape and reject NaN/inf.

Basis order of the joint space is |00>, |01>, |10>, |11>, i.e. component
(2i + j) belongs to |e1^i> (x) |e2^j>.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
import numpy.typing as npt

from entangle_sphere.errors import (
    NonFiniteError,
    NotDensityError,
    NotHermitianError,
    NotUnitError,
    ShapeError,
)

ComplexVector2 = npt.NDArray[np.complex128]
ComplexVector4 = npt.NDArray[np.complex128]
ComplexMatrix2 = npt.NDArray[np.complex128]
ComplexMatrix4 = npt.NDArray[np.complex128]

# Closed-form identities vs. anything that went through an eigensolver.
ALGEBRAIC_TOL = 1e-12
EIGEN_TOL = 1e-9

# Trace check used by partial_trace; looser than ALGEBRAIC_TOL so that
# matrices produced by a chain of products are not rejected.
TRACE_TOL = 1e-10

# Eigenvalue gap below which the computational basis is returned.
EIGEN_TIE_TOL = 1e-12

# Modulus difference below which two components count as equally large.
PHASE_TIE_TOL = 1e-12

IDENTITY2: ComplexMatrix2 = np.eye(2, dtype=np.complex128)
IDENTITY4: ComplexMatrix4 = np.eye(4, dtype=np.complex128)
COMPUTATIONAL_BASIS: tuple[ComplexVector2, ComplexVector2] = (
    np.array([1, 0], dtype=np.complex128),
    np.array([0, 1], dtype=np.complex128),
)


class Eigen2(NamedTuple):
    """Eigen-decomposition of a 2x2 Hermitian matrix, largest eigenvalue first."""

    values: tuple[float, float]
    vectors: tuple[ComplexVector2, ComplexVector2]


def _coerce(value: npt.ArrayLike, shape: tuple[int, ...], name: str) -> npt.NDArray[np.complex128]:
    array = np.asarray(value, dtype=np.complex128)
    if array.shape != shape:
        raise ShapeError(f"{name} must have shape {shape}, got {array.shape}")
    if not np.all(np.isfinite(array)):
        raise NonFiniteError(f"{name} contains NaN or infinite components")
    return array


def as_vector2(value: npt.ArrayLike) -> ComplexVector2:
    return _coerce(value, (2,), "vector")


def as_vector4(value: npt.ArrayLike) -> ComplexVector4:
    return _coerce(value, (4,), "vector")


def as_matrix2(value: npt.ArrayLike) -> ComplexMatrix2:
    return _coerce(value, (2, 2), "matrix")


def as_matrix4(value: npt.ArrayLike) -> ComplexMatrix4:
    return _coerce(value, (4, 4), "matrix")


def inner(a: npt.ArrayLike, b: npt.ArrayLike) -> complex:
    """Inner product <a, b>, conjugate-linear in the first argument."""
    return complex(np.vdot(a, b))


def dagger(matrix: npt.ArrayLike) -> npt.NDArray[np.complex128]:
    return np.conj(np.asarray(matrix, dtype=np.complex128)).T


def max_abs(matrix: npt.ArrayLike) -> float:
    """Largest entry modulus (the infinity norm used for all tolerances)."""
    return float(np.max(np.abs(matrix)))


def require_unit(vector: npt.ArrayLike, tol: float = ALGEBRAIC_TOL) -> npt.NDArray[np.complex128]:
    array = np.asarray(vector, dtype=np.complex128)
    norm2 = float(np.vdot(array, array).real)
    if abs(norm2 - 1.0) > tol:
        raise NotUnitError(f"expected a unit vector, got squared norm {norm2!r}")
    return array


def phase_normalize(vector: npt.ArrayLike) -> ComplexVector2:
    """Rotate the global phase so the first largest-modulus component is real >= 0."""
    v = as_vector2(vector)
    moduli = np.abs(v)
    k = 0 if moduli[0] >= moduli[1] - PHASE_TIE_TOL else 1
    if moduli[k] == 0.0:
        return v
    return v * (np.conj(v[k]) / moduli[k])


def orthogonal_complement(vector: npt.ArrayLike) -> ComplexVector2:
    """Unit vector orthogonal to ``vector`` under the standard phase convention."""
    v = as_vector2(vector)
    w = np.array([-np.conj(v[1]), np.conj(v[0])], dtype=np.complex128)
    return phase_normalize(w / np.linalg.norm(w))


def is_hermitian(matrix: npt.ArrayLike, tol: float = ALGEBRAIC_TOL) -> bool:
    m = np.asarray(matrix, dtype=np.complex128)
    return max_abs(m - dagger(m)) <= tol


def tensor_vector(a: npt.ArrayLike, b: npt.ArrayLike) -> ComplexVector4:
    """a (x) b, component (2i + j) = a_i * b_j."""
    return np.kron(as_vector2(a), as_vector2(b))


def tensor_operator(a: npt.ArrayLike, b: npt.ArrayLike) -> ComplexMatrix4:
    """A (x) B, entry ((2i + j), (2k + l)) = A_ik * B_jl."""
    return np.kron(as_matrix2(a), as_matrix2(b))


def partial_trace(density: npt.ArrayLike, keep: int) -> ComplexMatrix2:
    """Reduce a two-spin density matrix to subsystem ``keep`` (1 or 2)."""
    d = as_matrix4(density)
    trace = complex(np.trace(d))
    if abs(trace - 1.0) > TRACE_TOL:
        raise NotDensityError(f"partial_trace needs a unit-trace density matrix, got trace {trace!r}")
    blocks = d.reshape(2, 2, 2, 2)
    if keep == 1:
        return np.einsum("ajbj->ab", blocks)
    if keep == 2:
        return np.einsum("iaib->ab", blocks)
    raise ValueError(f"keep must be 1 or 2, got {keep!r}")


def hermitian_eigen2(matrix: npt.ArrayLike) -> Eigen2:
    """
    Closed-form eigen-decomposition of a 2x2 Hermitian matrix.

    The larger-magnitude eigenvalue comes from the trace and the half gap
    sqrt(((a - d) / 2)^2 + |b|^2), the other one from the determinant. The
    top eigenvector is the better conditioned of the two null vectors of
    (H - lambda), the second one is its orthogonal complement. Degenerate
    spectra return the computational basis.
    """
    h = as_matrix2(matrix)
    if not is_hermitian(h):
        raise NotHermitianError("hermitian_eigen2 needs a Hermitian matrix")

    a = float(h[0, 0].real)
    d = float(h[1, 1].real)
    b = complex(h[0, 1])
    mean = (a + d) / 2
    half_gap = math.hypot((a - d) / 2, abs(b))
    det = a * d - abs(b) ** 2
    if mean >= 0:
        upper = mean + half_gap
        lower = det / upper if upper > 0 else mean - half_gap
    else:
        lower = mean - half_gap
        upper = det / lower

    if 2 * half_gap <= EIGEN_TIE_TOL * max(1.0, abs(mean)):
        return Eigen2((upper, lower), COMPUTATIONAL_BASIS)

    first = np.array([b, upper - a], dtype=np.complex128)
    second = np.array([upper - d, b.conjugate()], dtype=np.complex128)
    top = first if np.linalg.norm(first) >= np.linalg.norm(second) else second
    top = phase_normalize(top / np.linalg.norm(top))
    return Eigen2((upper, lower), (top, orthogonal_complement(top)))


def projector(vector: npt.ArrayLike) -> ComplexMatrix2:
    """|x><x| for a unit vector x."""
    x = require_unit(as_vector2(vector))
    return np.outer(x, np.conj(x))


def require_density2(matrix: npt.ArrayLike, tol: float = ALGEBRAIC_TOL) -> ComplexMatrix2:
    """Return ``matrix`` as an array if it is Hermitian, unit trace and PSD."""
    d = as_matrix2(matrix)
    if not is_hermitian(d, tol):
        raise NotDensityError("density matrix must be Hermitian")
    trace = float(np.trace(d).real)
    if abs(trace - 1.0) > tol:
        raise NotDensityError(f"density matrix must have trace 1, got {trace!r}")
    smallest = hermitian_eigen2(d).values[1]
    if smallest < -tol:
        raise NotDensityError(f"density matrix must be positive semidefinite, got eigenvalue {smallest!r}")
    return d


def require_density4(matrix: npt.ArrayLike, tol: float = ALGEBRAIC_TOL) -> ComplexMatrix4:
    d = as_matrix4(matrix)
    if not is_hermitian(d, tol):
        raise NotDensityError("density matrix must be Hermitian")
    trace = float(np.trace(d).real)
    if abs(trace - 1.0) > tol:
        raise NotDensityError(f"density matrix must have trace 1, got {trace!r}")
    smallest = float(np.linalg.eigvalsh(d)[0])
    if smallest < -tol:
        raise NotDensityError(f"density matrix must be positive semidefinite, got eigenvalue {smallest!r}")
    return d


def same_ray(a: npt.ArrayLike, b: npt.ArrayLike, tol: float = EIGEN_TOL) -> bool:
    """True when two unit vectors differ only by a global phase."""
    return abs(abs(np.vdot(a, b)) - 1.0) <= tol
