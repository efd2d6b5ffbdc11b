"""
Brute-force reference computations in the full 4-dimensional space.

Nothing here goes through the constraint functions or the closed-form
eigensolver: collapse uses 4x4 Pauli projectors, the Schmidt parameter comes
from a singular value decomposition of the coefficient grid, and outcome
sampling draws from numpy's PCG64 generator seeded through a SeedSequence of
(seed, *key), so a given (seed, key) reproduces the same stream on every
platform.
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import numpy.typing as npt

from entangle_sphere.bloch import BlochPoint, MeasurementDirection, SpinPureState
from entangle_sphere.entangle import TwoQubitState
from entangle_sphere.errors import SphereModelError

PAULI = (
    np.array([[0, 1], [1, 0]], dtype=np.complex128),
    np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    np.array([[1, 0], [0, -1]], dtype=np.complex128),
)

# Squared norm below which an outcome is reported as impossible.
IMPOSSIBLE_TOL = 1e-20

MAX_SEED = 2**64 - 1


class RandomSource:
    """Reproducible PCG64 stream identified by a seed and a spawn key."""

    def __init__(self, seed: int, key: tuple[int, ...] = ()) -> None:
        if not 0 <= seed <= MAX_SEED:
            raise SphereModelError(f"seed must be a 64-bit unsigned integer, got {seed!r}")
        self.seed = seed
        self.key = tuple(key)
        self._generator = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, *self.key])))

    def __repr__(self) -> str:
        return f"RandomSource(seed={self.seed}, key={self.key})"

    def spawn(self, *key: int) -> RandomSource:
        """Independent child stream; depends only on (seed, key), not on draws made so far."""
        return RandomSource(self.seed, (*self.key, *key))

    def normal(self, size: int | tuple[int, ...]) -> npt.NDArray[np.float64]:
        return self._generator.standard_normal(size)

    def uniform(self, size: int | tuple[int, ...] | None = None) -> npt.NDArray[np.float64] | float:
        return self._generator.random(size)


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Outcome counts of a sampling run (outcomes +1 and -1)."""

    counts: Mapping[int, int]
    total: int

    def __post_init__(self) -> None:
        if self.total <= 0:
            raise SphereModelError("an empirical distribution needs at least one sample")
        if any(c < 0 for c in self.counts.values()) or sum(self.counts.values()) != self.total:
            raise SphereModelError(f"counts {dict(self.counts)} do not add up to {self.total}")

    def frequency(self, outcome: int) -> float:
        return self.counts.get(outcome, 0) / self.total

    def sigma(self, p: float) -> float:
        return math.sqrt(p * (1 - p) / self.total)

    def within_sigma(self, outcome: int, p: float, k: float = 3.0) -> bool:
        """|frequency - p| <= k sqrt(p (1 - p) / n)."""
        return abs(self.frequency(outcome) - p) <= k * self.sigma(p)


class OracleOutcome(NamedTuple):
    probability: float
    post: npt.NDArray[np.complex128] | None

    @property
    def impossible(self) -> bool:
        return self.post is None


class OracleSchmidt(NamedTuple):
    r: float
    singular_values: tuple[float, float]
    basis1: tuple[npt.NDArray[np.complex128], npt.NDArray[np.complex128]]
    basis2: tuple[npt.NDArray[np.complex128], npt.NDArray[np.complex128]]


def joint_vector(psi: TwoQubitState) -> npt.NDArray[np.complex128]:
    """sum_ij lambda_ij e1^i (x) e2^j as a length-4 array."""
    return np.einsum("ij,ia,jb->ab", psi.lambdas, psi.basis1, psi.basis2).reshape(4)


def pauli_projector(direction: MeasurementDirection) -> npt.NDArray[np.complex128]:
    """(1 + a . sigma) / 2."""
    a = direction.axis
    return 0.5 * (np.eye(2) + a[0] * PAULI[0] + a[1] * PAULI[1] + a[2] * PAULI[2])


def random_two_qubit_state(rng: RandomSource) -> TwoQubitState:
    """Normalized complex Gaussian amplitudes (unitarily invariant)."""
    parts = rng.normal((2, 4))
    amplitudes = parts[0] + 1j * parts[1]
    return TwoQubitState.from_amplitudes(amplitudes / np.linalg.norm(amplitudes))


def random_direction(rng: RandomSource) -> MeasurementDirection:
    axis = rng.normal(3)
    while np.linalg.norm(axis) < 1e-12:
        axis = rng.normal(3)
    return MeasurementDirection.from_axis(axis)


def random_spin_state(rng: RandomSource) -> SpinPureState:
    return random_direction(rng).state


def random_bloch_point(rng: RandomSource) -> BlochPoint:
    """Uniform in the unit ball."""
    direction = random_direction(rng)
    radius = float(rng.uniform()) ** (1 / 3)
    return BlochPoint(min(radius, 1.0), direction.theta, direction.phi)


def random_unitary2(rng: RandomSource) -> npt.NDArray[np.complex128]:
    """Haar-random 2x2 unitary from the QR decomposition of a Ginibre matrix."""
    parts = rng.normal((2, 2, 2))
    q, r = np.linalg.qr(parts[0] + 1j * parts[1])
    diagonal = np.diag(r)
    return q * (diagonal / np.abs(diagonal))


def brute_force_collapse(
    psi: TwoQubitState, direction: MeasurementDirection, side: int = 1
) -> tuple[OracleOutcome, OracleOutcome]:
    """
    (P+ (x) 1)|psi> and (P- (x) 1)|psi> (or 1 (x) P on side 2).

    Probabilities are squared norms; the post vectors are normalized, or None
    when the outcome cannot occur.
    """
    if side not in (1, 2):
        raise SphereModelError(f"side must be 1 or 2, got {side!r}")
    vector = joint_vector(psi)
    plus = pauli_projector(direction)
    outcomes = []
    for p in (plus, np.eye(2) - plus):
        operator = np.kron(p, np.eye(2)) if side == 1 else np.kron(np.eye(2), p)
        post = operator @ vector
        norm2 = float(np.vdot(post, post).real)
        outcomes.append(OracleOutcome(norm2, None if norm2 <= IMPOSSIBLE_TOL else post / math.sqrt(norm2)))
    return outcomes[0], outcomes[1]


def brute_force_schmidt(psi: TwoQubitState) -> OracleSchmidt:
    """SVD of the coefficient grid: psi = s0 u0 (x) v0 + s1 u1 (x) v1."""
    grid = joint_vector(psi).reshape(2, 2)
    u, s, vh = np.linalg.svd(grid)
    r = min(max(float(s[0] ** 2 - s[1] ** 2), 0.0), 1.0)
    return OracleSchmidt(
        r=r,
        singular_values=(float(s[0]), float(s[1])),
        basis1=(u[:, 0], u[:, 1]),
        basis2=(vh[0], vh[1]),
    )


def _count_plus(source: RandomSource, draws: int, p: float) -> int:
    if draws == 0:
        return 0
    return int(np.count_nonzero(source.uniform(draws) < p))


def monte_carlo_outcomes(
    psi: TwoQubitState,
    direction: MeasurementDirection,
    n: int,
    rng: RandomSource,
    workers: int = 1,
    side: int = 1,
) -> EmpiricalDistribution:
    """
    Sample n collapse outcomes with the brute-force probabilities.

    Draws are split across ``workers`` threads; worker k uses
    ``rng.spawn(k)``, so the counts depend only on (seed, key, n, workers).
    """
    if n < 1:
        raise SphereModelError(f"need at least one draw, got n = {n}")
    if workers < 1:
        raise SphereModelError(f"need at least one worker, got {workers}")
    p = brute_force_collapse(psi, direction, side)[0].probability
    sizes = [len(chunk) for chunk in np.array_split(np.arange(n), workers)]
    sources = [rng.spawn(k) for k in range(workers)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        plus = sum(pool.map(_count_plus, sources, sizes, [p] * workers))
    return EmpiricalDistribution(counts={1: plus, -1: n - plus}, total=n)
