"""
Seeded property suites for every module, plus the markdown report.

Each suite draws its inputs from its own child stream
``RandomSource(seed).spawn(index)``, tracks the worst residual against its
tolerance and keeps the inputs of the first counterexample. Library calls go
through the module objects (``entangle.apply_constraint``, ...) so a patched
module is what gets verified.
"""

from __future__ import annotations

import cmath
import math
import re
import tempfile
import tomllib
from collections.abc import Callable, Iterator
from contextlib import contextmanager
from dataclasses import dataclass, field
from datetime import datetime
from importlib import metadata
from pathlib import Path

import numpy as np
import numpy.typing as npt

from entangle_sphere import bloch, entangle, linalg, measurement, oracle
from entangle_sphere.bloch import BlochPoint, MeasurementDirection, SpinPureState
from entangle_sphere.documents import StateDocument, read_grid, write_grid
from entangle_sphere.entangle import TwoQubitState
from entangle_sphere.errors import SphereModelError
from entangle_sphere.oracle import RandomSource

DEFAULT_SEED = 42
DEFAULT_CASES = 1000

# Grid and sample sizes that do not scale with --cases.
LAW_GRID = 50
LAW_RADII = (0.0, 0.25, 0.5, 0.75, 1.0)
MAX_EXPANSIONS = 100
SAMPLE_VECTORS = 20
MAX_LITTLE_SPHERE = 100
EQUATOR_SAMPLES = 100
MAX_CONES = 200
MAX_DOCUMENTS = 100
MAX_GRIDS = 20
GRID_SHAPE = (10, 12)
# Grid values are re-read from 17-digit text.
GRID_TOL = 1e-9
# 1 - r for near-product states spans 10^-1 .. 10^-9.6.
NEAR_PRODUCT_DECADES = (1.0, 9.6)


@dataclass
class VerifyConfig:
    """Verification run configuration."""

    seed: int = DEFAULT_SEED
    cases: int = DEFAULT_CASES
    workers: int = 1
    tolerance: float = linalg.ALGEBRAIC_TOL  # closed-form identities
    skip_monte_carlo: bool = False
    monte_carlo_cases: int = 50
    monte_carlo_draws: int = 100_000

    def __post_init__(self) -> None:
        if not 0 <= self.seed <= oracle.MAX_SEED:
            raise SphereModelError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if self.cases < 0:
            raise SphereModelError(f"cases must be >= 0, got {self.cases!r}")
        if self.workers < 1:
            raise SphereModelError(f"workers must be >= 1, got {self.workers!r}")
        if not (math.isfinite(self.tolerance) and self.tolerance > 0):
            raise SphereModelError(f"tolerance must be a positive number, got {self.tolerance!r}")
        if self.monte_carlo_cases < 1 or self.monte_carlo_draws < 1:
            raise SphereModelError("Monte Carlo needs at least one case and one draw")

    @property
    def eigen_tolerance(self) -> float:
        return max(linalg.EIGEN_TOL, self.tolerance)


@dataclass
class SuiteResult:
    """Outcome of one property suite."""

    module: str
    name: str
    cases: int
    worst_residual: float
    tolerance: float
    failures: int = 0
    counterexample: str | None = None
    skipped: bool = False

    @property
    def passed(self) -> bool:
        return self.failures == 0

    @property
    def label(self) -> str:
        return f"{self.module}/{self.name}"


@dataclass
class _Residuals:
    module: str
    name: str
    tolerance: float
    cases: int = 0
    worst: float = 0.0
    failures: int = 0
    counterexample: str | None = None
    _describe: Callable[[], str] = field(default=lambda: "", repr=False)

    @contextmanager
    def case(self, describe: Callable[[], str]) -> Iterator[None]:
        self.cases += 1
        self._describe = describe
        try:
            yield
        except SphereModelError as exc:
            self._fail(f"{describe()}: raised {type(exc).__name__}: {exc}")

    def record(self, residual: float, tolerance: float | None = None) -> None:
        limit = self.tolerance if tolerance is None else tolerance
        if math.isnan(residual) or residual > limit:
            self._fail(f"{self._describe()}: residual {residual:.3e} > {limit:.0e}")
        if not math.isnan(residual):
            self.worst = max(self.worst, residual)

    def check(self, condition: bool, message: str) -> None:
        if not condition:
            self._fail(f"{self._describe()}: {message}")

    def _fail(self, message: str) -> None:
        self.failures += 1
        if self.counterexample is None:
            self.counterexample = message

    def result(self) -> SuiteResult:
        return SuiteResult(
            module=self.module,
            name=self.name,
            cases=self.cases,
            worst_residual=self.worst,
            tolerance=self.tolerance,
            failures=self.failures,
            counterexample=self.counterexample,
        )


def _fmt(array: npt.ArrayLike) -> str:
    return np.array2string(np.asarray(array), precision=17, separator=", ", max_line_width=10_000)


def _fmt_state(psi: TwoQubitState) -> str:
    return f"amplitudes={_fmt(psi.vector)}"


def _fmt_angles(item: MeasurementDirection | SpinPureState | BlochPoint) -> str:
    prefix = f"r={item.r!r}, " if isinstance(item, BlochPoint) else ""
    return f"{type(item).__name__}({prefix}theta={item.theta!r}, phi={item.phi!r})"


def _random_complex(rng: RandomSource) -> complex:
    re, im = rng.normal(2)
    return complex(re, im)


def _random_vector(rng: RandomSource) -> npt.NDArray[np.complex128]:
    """Unit vector with a random global phase."""
    phase = cmath.exp(2j * math.pi * float(rng.uniform()))
    return phase * oracle.random_spin_state(rng).vector


def _random_matrix(rng: RandomSource) -> npt.NDArray[np.complex128]:
    parts = rng.normal((2, 2, 2))
    return parts[0] + 1j * parts[1]


def _random_hermitian(rng: RandomSource) -> npt.NDArray[np.complex128]:
    a = _random_matrix(rng)
    return (a + linalg.dagger(a)) / 2


def _random_density4(rng: RandomSource) -> npt.NDArray[np.complex128]:
    weight = float(rng.uniform())
    first = oracle.random_two_qubit_state(rng).density
    second = oracle.random_two_qubit_state(rng).density
    return weight * first + (1 - weight) * second


def _with_parameter(r: float, rng: RandomSource) -> TwoQubitState:
    """sqrt((1+r)/2)|00> + sqrt((1-r)/2)|11> under random local unitaries."""
    core = np.array([math.sqrt((1 + r) / 2), 0, 0, math.sqrt((1 - r) / 2)], dtype=np.complex128)
    local = np.kron(oracle.random_unitary2(rng), oracle.random_unitary2(rng))
    return TwoQubitState.normalized(local @ core)


def _locally_rotated(psi: TwoQubitState, rng: RandomSource) -> TwoQubitState:
    local = np.kron(oracle.random_unitary2(rng), oracle.random_unitary2(rng))
    return TwoQubitState.normalized(local @ psi.vector)


def _ray_residual(a: npt.ArrayLike, b: npt.ArrayLike) -> float:
    return abs(abs(np.vdot(a, b)) - 1.0)


def _wrapped(angle: float) -> float:
    """Angle reduced to (-pi, pi]."""
    return math.remainder(angle, 2 * math.pi)


# linalg


def _partial_trace_of_product(config: VerifyConfig, rng: RandomSource) -> SuiteResult:
    res = _Residuals("linalg", "partial-trace-of-product", config.tolerance)
    for _ in range(config.cases):
        d1 = bloch.density_from_bloch(oracle.random_bloch_point(rng))
        d2 = bloch.density_from_bloch(oracle.random_bloch_point(rng))
        with res.case(lambda: f"D1={_fmt(d1)}, D2={_fmt(d2)}"):
            joint = linalg.tensor_operator(d1, d2)
            res.record(
                max(
                    linalg.max_abs(linalg.partial_trace(joint, keep=1) - d1),
                    linalg.max_abs(linalg.partial_trace(joint, keep=2) - d2),
                )
            )
    return res.result()


def _partial_trace_keeps_trace(config: VerifyConfig, rng: RandomSource) -> SuiteResult:
    res = _Residuals("linalg", "partial-trace-trace", config.tolerance)
    for _ in range(config.cases):
        d = _random_density4(rng)
        with res.case(lambda: f"D={_fmt(d)}"):
            total = complex(np.trace(d))
            res.record(
                max(abs(complex(np.trace(linalg.partial_trace(d, keep=k))) - total) for k in (1, 2))
            )
    return res.result()


def _eigen_reconstruction(config: VerifyConfig, rng: RandomSource) -> SuiteResult:
    res = _Residuals("linalg", "eigen-reconstruction", config.eigen_tolerance)
    for _ in range(config.cases):
        h = _random_hermitian(rng)
        with res.case(lambda: f"H={_fmt(h)}"):
            eigen = linalg.hermitian_eigen2(h)
            rebuilt = sum(value * np.outer(v, v.conj()) for value, v in zip(eigen.values, eigen.vectors))
            vectors = np.array(eigen.vectors)
            res.check(eigen.values[0] >= eigen.values[1], "eigenvalues not descending")
            res.record(
                max(
                    linalg.max_abs(rebuilt - h),
                    linalg.max_abs(vectors.conj() @ vectors.T - linalg.IDENTITY2),
                )
            )
    return res.result()


def _tensor_mixed_product(config: VerifyConfig, rng: RandomSource) -> SuiteResult:
    res = _Residuals("linalg", "tensor-mixed-product", config.tolerance)
    for _ in range(config.cases):
        a_op, b_op = _random_hermitian(rng), oracle.random_unitary2(rng)
        a, b = _random_vector(rng), _random_vector(rng)
        with res.case(lambda: f"A={_fmt(a_op)}, B={_fmt(b_op)}, a={_fmt(a)}, b={_fmt(b)}"):
            lhs = linalg.tensor_operator(a_op, b_op) @ linalg.tensor_vector(a, b)
            res.record(linalg.max_abs(lhs - linalg.tensor_vector(a_op @ a, b_op @ b)))
    return res.result()


# bloch


def _bloch_round_trip(config: VerifyConfig, rng: RandomSource) -> SuiteResult:
    res = _Residuals("bloch", "density-round-trip", config.tolerance)
    for _ in range(config.cases):
        p = oracle.random_bloch_point(rng)
        with res.case(lambda: _fmt_angles(p)):
            back = bloch.bloch_from_density(bloch.density_from_bloch(p))
            res.record(linalg.max_abs(back.cartesian - p.cartesian))
    return res.result()


def _luder_geometry(config: VerifyConfig, rng: RandomSource) -> SuiteResult:
    res = _Residuals("bloch", "luder-is-projection", config.tolerance)
    for _ in range(config.cases):
        p, direction = oracle.random_bloch_point(rng), oracle.random_direction(rng)
        with res.case(lambda: f"{_fmt_angles(p)}, {_fmt_angles(direction)}"):
            measured = bloch.bloch_from_density(bloch.luder_single(bloch.density_from_bloch(p), direction))
            projected = bloch.geometric_projection(p, direction)
            res.record(linalg.max_abs(measured.cartesian - projected.cartesian))
    return res.result()


def _little_sphere(config: VerifyConfig, rng: RandomSource) -> SuiteResult:
    res = _Residuals("bloch", "little-sphere", config.tolerance)
    count = min(config.cases, MAX_LITTLE_SPHERE)
    points = [oracle.random_bloch_point(rng) for _ in range(count)]
    directions = [oracle.random_direction(rng) for _ in range(count)]
    for p in points:
        sphere = bloch.reachable_sphere(p)
        for direction in directions:
            with res.case(lambda: f"{_fmt_angles(p)}, {_fmt_angles(direction)}"):
                projected = bloch.geometric_projection(p, direction)
                distance = float(np.linalg.norm(projected.cartesian - p.cartesian / 2))
                res.record(abs(distance - float(np.linalg.norm(p.cartesian)) / 2))
                res.check(sphere.contains(projected, config.tolerance), "projection off the reachable sphere")
    return res.result()


def _luder_idempotent(config: VerifyConfig, rng: RandomSource) -> SuiteResult:
    res = _Residuals("bloch", "luder-idempotent", config.tolerance)
    for _ in range(config.cases):
        p, direction = oracle.random_bloch_point(rng), oracle.random_direction(rng)
        with res.case(lambda: f"{_fmt_angles(p)}, {_fmt_angles(direction)}"):
            once = bloch.luder_single(bloch.density_from_bloch(p), direction)
            res.record(linalg.max_abs(bloch.luder_single(once, direction) - once))
    return res.result()


def _overlap(config: VerifyConfig, rng: RandomSource) -> SuiteResult:
    res = _Residuals("bloch", "overlap-from-points", config.tolerance)
    for _ in range(config.cases):
        x, y = oracle.random_spin_state(rng), oracle.random_spin_state(rng)
        with res.case(lambda: f"{_fmt_angles(x)}, {_fmt_angles(y)}"):
            expected = abs(linalg.inner(x.vector, y.vector)) ** 2
            res.record(abs(bloch.overlap_from_points(x.point, y.point) - expected))
    return res.result()


def _axis_branch_form(config: VerifyConfig, rng: RandomSource) -> SuiteResult:
    res = _Residuals("bloch", "axis-branch-form", config.tolerance)
    for _ in range(config.cases):
        s, direction = float(rng.uniform()), oracle.random_direction(rng)
        with res.case(lambda: f"s={s!r}, {_fmt_angles(direction)}"):
            literal = bloch.axis_projection_literal(s, direction)
            projected = bloch.geometric_projection(BlochPoint(s), direction)
            res.record(linalg.max_abs(literal.cartesian - projected.cartesian))
    return res.result()


# entangle


def _canonical_definition(config: VerifyConfig, rng: RandomSource) -> SuiteResult:
    res = _Residuals("entangle", "canonical-definition", config.eigen_tolerance)
    for _ in range(min(config.cases, MAX_EXPANSIONS)):
        psi = oracle.random_two_qubit_state(rng)
        u, v = oracle.random_unitary2(rng), oracle.random_unitary2(rng)
        samples = [_random_vector(rng) for _ in range(SAMPLE_VECTORS)]
        with res.case(lambda: f"{_fmt_state(psi)}, U={_fmt(u)}, V={_fmt(v)}"):
            expanded = psi.expanded_in(u.T, v.T)
            pairs = (
                (entangle.constraint_f12(psi), entangle.constraint_f12(expanded)),
                (entangle.constraint_f21(psi), entangle.constraint_f21(expanded)),
            )
            res.record(
                max(
                    linalg.max_abs(entangle.apply_constraint(f, x) - entangle.apply_constraint(g, x))
                    for f, g in pairs
                    for x in samples
                )
            )
    return res.result()


def _conjugate_linearity(config: VerifyConfig, rng: RandomSource) -> SuiteResult:
    res = _Residuals("entangle", "conjugate-linearity", config.tolerance)
    for _ in range(config.cases):
        psi = oracle.random_two_qubit_state(rng)
        alpha, beta = _random_complex(rng), _random_complex(rng)
        x, y = _random_vector(rng), _random_vector(rng)
        with res.case(lambda: f"{_fmt_state(psi)}, alpha={alpha!r}, beta={beta!r}, x={_fmt(x)}, y={_fmt(y)}"):
            worst = 0.0
            for f in (entangle.constraint_f12(psi), entangle.constraint_f21(psi)):
                lhs = entangle.apply_constraint(f, alpha * x + beta * y)
                rhs = alpha.conjugate() * entangle.apply_constraint(f, x) + beta.conjugate() * entangle.apply_constraint(f, y)
                worst = max(worst, linalg.max_abs(lhs - rhs))
            res.record(worst)
    return res.result()


def _composition(config: VerifyConfig, rng: RandomSource) -> SuiteResult:
    res = _Residuals("entangle", "composition-is-partial-trace", config.tolerance)
    for _ in range(config.cases):
        psi = oracle.random_two_qubit_state(rng)
        with res.case(lambda: _fmt_state(psi)):
            f12, f21 = entangle.constraint_f12(psi), entangle.constraint_f21(psi)
            d = psi.density
            # the maps only compose through their action, so compare it as well
            x = _random_vector(rng)
            through = entangle.apply_constraint(f21, entangle.apply_constraint(f12, x))
            res.record(
                max(
                    linalg.max_abs(entangle.compose_constraints(f21, f12) - linalg.partial_trace(d, keep=1)),
                    linalg.max_abs(entangle.compose_constraints(f12, f21) - linalg.partial_trace(d, keep=2)),
                    linalg.max_abs(through - linalg.partial_trace(d, keep=1) @ x),
                )
            )
    return res.result()


def _adjoint_relation(config: VerifyConfig, rng: RandomSource) -> SuiteResult:
    res = _Residuals("entangle", "adjoint-relation", config.tolerance)
    for _ in range(config.cases):
        psi = oracle.random_two_qubit_state(rng)
        x1, x2 = _random_vector(rng), _random_vector(rng)
        with res.case(lambda: f"{_fmt_state(psi)}, x1={_fmt(x1)}, x2={_fmt(x2)}"):
            lhs, rhs = entangle.adjoint_relation_check(psi, x1, x2)
            res.record(abs(lhs - rhs))
    return res.result()


def _schmidt_soundness(config: VerifyConfig, rng: RandomSource) -> SuiteResult:
    res = _Residuals("entangle", "schmidt-soundness", config.eigen_tolerance)
    for _ in range(config.cases):
        psi = oracle.random_two_qubit_state(rng)
        rotated = _locally_rotated(psi, rng)
        with res.case(lambda: _fmt_state(psi)):
            form = entangle.schmidt_decompose(psi)
            res.check(0.0 <= form.r <= 1.0, f"r = {form.r!r} outside [0, 1]")
            c1, c2 = form.coefficients
            worst = abs(c1 * c1 + c2 * c2 - 1.0)
            for basis in (form.basis1, form.basis2):
                rows = np.array(basis)
                worst = max(worst, linalg.max_abs(rows.conj() @ rows.T - linalg.IDENTITY2))
            worst = max(worst, _ray_residual(entangle.reconstruct_state(form).vector, psi.vector))
            worst = max(worst, abs(entangle.entanglement_parameter(rotated) - form.r))
            res.record(worst)
    return res.result()


def _pole_mapping(config: VerifyConfig, rng: RandomSource) -> SuiteResult:
    res = _Residuals("entangle", "pole-mapping", config.eigen_tolerance)
    for _ in range(config.cases):
        psi = oracle.random_two_qubit_state(rng)
        with res.case(lambda: _fmt_state(psi)):
            form = entangle.schmidt_decompose(psi)
            d2 = linalg.partial_trace(psi.density, keep=2)
            worst = 0.0
            for vector, value in zip(form.basis2, ((1 + form.r) / 2, (1 - form.r) / 2)):
                worst = max(worst, abs(linalg.inner(vector, vector).real - 1.0))
                worst = max(worst, linalg.max_abs(d2 @ vector - value * vector))
            res.record(worst)
    return res.result()


def _schmidt_landmarks(config: VerifyConfig, rng: RandomSource) -> SuiteResult:
    res = _Residuals("entangle", "schmidt-landmarks", config.tolerance)
    product = TwoQubitState.product(_random_vector(rng), _random_vector(rng))
    landmarks = (
        ("singlet", TwoQubitState.singlet(), 0.0),
        ("product", product, 1.0),
        ("0.6|00>+0.8|11>", TwoQubitState.from_amplitudes([0.6, 0, 0, 0.8]), 0.28),
    )
    for label, psi, expected in landmarks:
        with res.case(lambda: f"{label}: {_fmt_state(psi)}"):
            res.record(abs(entangle.schmidt_decompose(psi).r - expected))
    return res.result()


# measurement


def _probability_normalization(config: VerifyConfig, rng: RandomSource) -> SuiteResult:
    res = _Residuals("measurement", "probability-normalization", config.tolerance)
    for _ in range(config.cases):
        psi, direction = oracle.random_two_qubit_state(rng), oracle.random_direction(rng)
        with res.case(lambda: f"{_fmt_state(psi)}, {_fmt_angles(direction)}"):
            res.record(
                max(
                    abs(sum(o.probability for o in measurement.collapse(psi, direction, side)) - 1.0)
                    for side in (1, 2)
                )
            )
    return res.result()


def _remote_invariance(config: VerifyConfig, rng: RandomSource) -> SuiteResult:
    res = _Residuals("measurement", "remote-invariance", config.tolerance)
    for _ in range(config.cases):
        psi, direction = oracle.random_two_qubit_state(rng), oracle.random_direction(rng)
        side = 1 if rng.uniform() < 0.5 else 2
        with res.case(lambda: f"{_fmt_state(psi)}, {_fmt_angles(direction)}, side={side}"):
            before, after = measurement.remote_invariance_check(psi, direction, measured=side)
            res.record(linalg.max_abs(after - before))
            predicted = measurement.measured_side_prediction(psi, direction, side)
            actual = linalg.partial_trace(measurement.luder(psi, direction, side), keep=side)
            res.record(linalg.max_abs(predicted - actual), config.eigen_tolerance)
    return res.result()


def _image_laws(config: VerifyConfig, rng: RandomSource) -> SuiteResult:
    res = _Residuals("measurement", "norm-and-axis-laws", config.tolerance)
    thetas = np.linspace(0.0, math.pi, LAW_GRID)
    phis = 2 * math.pi * np.arange(LAW_GRID) / LAW_GRID
    for r in LAW_RADII:
        psi = _with_parameter(r, rng)
        form = entangle.schmidt_decompose(psi)
        for theta in thetas:
            for phi in phis:
                x = SpinPureState(float(theta), float(phi))
                with res.case(lambda: f"r={r}, {_fmt_state(psi)}, {_fmt_angles(x)}"):
                    image = measurement.normalized_image(psi, x, schmidt=form)
                    if r == 1.0 and theta == math.pi:
                        res.check(image.degenerate, "south pole image of a product state is not degenerate")
                        continue
                    res.record(
                        max(
                            abs(image.norm2 - measurement.norm_law(r, x.theta)),
                            abs(image.axis_projection - measurement.axis_law(r, x.theta)),
                            abs(image.schmidt_overlap - measurement.overlap_law(r, x.theta)),
                        )
                    )
    return res.result()


def _azimuth_reflection(config: VerifyConfig, rng: RandomSource) -> SuiteResult:
    res = _Residuals("measurement", "azimuth-reflection", config.eigen_tolerance)
    for _ in range(config.cases):
        psi = _with_parameter(0.98 * float(rng.uniform()), rng)
        x = SpinPureState(0.1 + (math.pi - 0.2) * float(rng.uniform()), 2 * math.pi * float(rng.uniform()))
        with res.case(lambda: f"{_fmt_state(psi)}, {_fmt_angles(x)}"):
            image = measurement.normalized_image(psi, x)
            res.record(abs(_wrapped(image.phi2 + x.phi)))
    return res.result()


def _equator_cone(config: VerifyConfig, rng: RandomSource) -> SuiteResult:
    res = _Residuals("measurement", "equator-cone", config.tolerance)
    for _ in range(min(config.cases, MAX_CONES)):
        psi = oracle.random_two_qubit_state(rng)
        with res.case(lambda: _fmt_state(psi)):
            cone = measurement.cone_of_equator(psi, samples=EQUATOR_SAMPLES)
            res.record(max(cone.max_residual, abs(math.cos(cone.beta) - cone.r)))
    return res.result()


def _antipodality(config: VerifyConfig, rng: RandomSource) -> SuiteResult:
    res = _Residuals("measurement", "antipodality-iff-singlet", config.tolerance)
    singlet = TwoQubitState.singlet()
    for k in range(config.cases):
        psi = _locally_rotated(singlet, rng) if k % 2 else oracle.random_two_qubit_state(rng)
        x = SpinPureState(0.05 + (math.pi - 0.1) * float(rng.uniform()), 2 * math.pi * float(rng.uniform()))
        with res.case(lambda: f"{_fmt_state(psi)}, {_fmt_angles(x)}"):
            form = entangle.schmidt_decompose(psi)
            overlap = measurement.orthogonality_image(psi, x, schmidt=form)
            res.record(abs(abs(overlap) - measurement.orthogonality_closed_form(form.r, x.theta)))
            preserved = abs(overlap) <= config.tolerance
            res.check(preserved == (form.r <= config.tolerance), f"r={form.r!r} but |<y+, y->| = {abs(overlap)!r}")
    return res.result()


def _collinearity(config: VerifyConfig, rng: RandomSource) -> SuiteResult:
    res = _Residuals("measurement", "collinear-images", config.eigen_tolerance)
    for _ in range(config.cases):
        psi = oracle.random_two_qubit_state(rng)
        x = oracle.random_spin_state(rng)
        with res.case(lambda: f"{_fmt_state(psi)}, {_fmt_angles(x)}"):
            form = entangle.schmidt_decompose(psi)
            if form.r >= 1 - entangle.PRODUCT_TOL:
                continue
            res.record(measurement.line_image_check(psi, x, schmidt=form).cross_norm)
    return res.result()


# oracle


def _oracle_collapse(config: VerifyConfig, rng: RandomSource) -> SuiteResult:
    res = _Residuals("oracle", "collapse-agreement", config.tolerance)
    for _ in range(config.cases):
        psi, direction = oracle.random_two_qubit_state(rng), oracle.random_direction(rng)
        side = 1 if rng.uniform() < 0.5 else 2
        with res.case(lambda: f"{_fmt_state(psi)}, {_fmt_angles(direction)}, side={side}"):
            for primary, reference in zip(
                measurement.collapse(psi, direction, side), oracle.brute_force_collapse(psi, direction, side)
            ):
                res.record(abs(primary.probability - reference.probability))
                if reference.probability > config.tolerance and not primary.impossible:
                    res.record(_ray_residual(primary.joint_state, reference.post))
    return res.result()


def _oracle_schmidt(config: VerifyConfig, rng: RandomSource) -> SuiteResult:
    res = _Residuals("oracle", "schmidt-agreement", config.eigen_tolerance)
    for _ in range(config.cases):
        psi = oracle.random_two_qubit_state(rng)
        with res.case(lambda: _fmt_state(psi)):
            res.record(abs(entangle.entanglement_parameter(psi) - oracle.brute_force_schmidt(psi).r))
    return res.result()


def _determinism(config: VerifyConfig, rng: RandomSource) -> SuiteResult:
    res = _Residuals("oracle", "determinism", 0.0)
    for k in range(min(config.cases, 10)):
        with res.case(lambda: f"seed={config.seed}, key={k}"):
            first = oracle.random_two_qubit_state(RandomSource(config.seed, (k,)))
            second = oracle.random_two_qubit_state(RandomSource(config.seed, (k,)))
            res.check(np.array_equal(first.vector, second.vector), "same seed produced different states")
            direction = MeasurementDirection(1.0, 2.0)
            counts = [
                oracle.monte_carlo_outcomes(first, direction, 1000, RandomSource(config.seed, (k,)), config.workers).counts
                for _ in range(2)
            ]
            res.check(counts[0] == counts[1], "same seed produced different samples")
    return res.result()


def _monte_carlo(config: VerifyConfig, rng: RandomSource) -> SuiteResult:
    # residual is |frequency - p| in units of the binomial standard deviation
    res = _Residuals("oracle", "monte-carlo-3-sigma", 3.0)
    for k in range(min(config.cases, config.monte_carlo_cases)):
        psi, direction = oracle.random_two_qubit_state(rng), oracle.random_direction(rng)
        with res.case(lambda: f"{_fmt_state(psi)}, {_fmt_angles(direction)}"):
            p = oracle.brute_force_collapse(psi, direction)[0].probability
            dist = oracle.monte_carlo_outcomes(psi, direction, config.monte_carlo_draws, rng.spawn(k), config.workers)
            sigma = dist.sigma(p)
            deviation = abs(dist.frequency(1) - p)
            res.record(deviation / sigma if sigma > 0 else (0.0 if deviation == 0 else math.inf))
    return res.result()


def _near_product(config: VerifyConfig, rng: RandomSource) -> SuiteResult:
    res = _Residuals("entangle", "near-product-schmidt", config.eigen_tolerance)
    low, high = NEAR_PRODUCT_DECADES
    for _ in range(config.cases):
        r = 1.0 - 10.0 ** -(low + (high - low) * float(rng.uniform()))
        psi = _with_parameter(r, rng)
        x = SpinPureState(0.3 + (math.pi - 0.6) * float(rng.uniform()), 2 * math.pi * float(rng.uniform()))
        with res.case(lambda: f"r={r!r}, {_fmt_state(psi)}, {_fmt_angles(x)}"):
            form = entangle.schmidt_decompose(psi)
            worst = abs(form.r - r)
            worst = max(worst, _ray_residual(entangle.reconstruct_state(form).vector, psi.vector))
            worst = max(worst, measurement.line_image_check(psi, x, schmidt=form).cross_norm)
            res.record(worst)
    return res.result()


# cli


def _document_round_trip(config: VerifyConfig, rng: RandomSource) -> SuiteResult:
    res = _Residuals("cli", "document-round-trip", 0.0)
    with tempfile.TemporaryDirectory(prefix="sphere-verify-") as scratch:
        path = Path(scratch) / "state.json"
        for k in range(min(config.cases, MAX_DOCUMENTS)):
            psi = oracle.random_two_qubit_state(rng)
            with res.case(lambda: _fmt_state(psi)):
                document = StateDocument.from_state(psi, label=f"case {k}")
                document.dump(path)
                loaded = StateDocument.load(path)
                res.check(loaded == document, "re-read document differs")
                res.check(np.array_equal(loaded.vector, psi.vector), "amplitudes are not bit-exact after a round trip")
    return res.result()


def _grid_reparse(config: VerifyConfig, rng: RandomSource) -> SuiteResult:
    res = _Residuals("cli", "grid-reparse", GRID_TOL)
    columns = {name: index for index, name in enumerate(measurement.GRID_COLUMNS)}
    with tempfile.TemporaryDirectory(prefix="sphere-verify-") as scratch:
        path = Path(scratch) / "grid.csv"
        for _ in range(min(config.cases, MAX_GRIDS)):
            psi = oracle.random_two_qubit_state(rng)
            with res.case(lambda: _fmt_state(psi)):
                grid = measurement.sphere_deformation_grid(psi, *GRID_SHAPE)
                write_grid(path, grid)
                table = read_grid(path)
                res.check(np.array_equal(table.rows, grid.rows, equal_nan=True), "re-read grid differs")
                for row in table.rows:
                    if np.isnan(row[columns["norm2"]]):
                        continue
                    theta1 = float(row[columns["theta1"]])
                    res.record(abs(row[columns["norm2"]] - measurement.norm_law(grid.r, theta1)))
                    res.record(abs(row[columns["axis_projection"]] - measurement.axis_law(grid.r, theta1)))
    return res.result()


Suite = Callable[[VerifyConfig, RandomSource], SuiteResult]

SUITES: list[Suite] = [
    _partial_trace_of_product,
    _partial_trace_keeps_trace,
    _eigen_reconstruction,
    _tensor_mixed_product,
    _bloch_round_trip,
    _luder_geometry,
    _little_sphere,
    _luder_idempotent,
    _overlap,
    _axis_branch_form,
    _canonical_definition,
    _conjugate_linearity,
    _composition,
    _adjoint_relation,
    _schmidt_soundness,
    _pole_mapping,
    _schmidt_landmarks,
    _probability_normalization,
    _remote_invariance,
    _image_laws,
    _azimuth_reflection,
    _equator_cone,
    _antipodality,
    _collinearity,
    _oracle_collapse,
    _oracle_schmidt,
    _determinism,
    _monte_carlo,
    # spawn keys follow list position; new suites go last
    _near_product,
    _document_round_trip,
    _grid_reparse,
]


def _run_suite(suite: Suite, config: VerifyConfig, rng: RandomSource) -> SuiteResult:
    try:
        return suite(config, rng)
    except SphereModelError as exc:
        # raised outside a guarded case, e.g. while preparing shared inputs
        name = suite.__name__.lstrip("_").replace("_", "-")
        return SuiteResult(
            module="suite",
            name=name,
            cases=0,
            worst_residual=math.nan,
            tolerance=config.tolerance,
            failures=1,
            counterexample=f"seed={config.seed}: raised {type(exc).__name__}: {exc}",
        )


def run_verification(
    config: VerifyConfig, report: Callable[[SuiteResult], None] | None = None
) -> list[SuiteResult]:
    """Run every suite in order; ``report`` is called after each one."""
    if config.cases <= 0:
        return []
    root = RandomSource(config.seed)
    results = []
    for index, suite in enumerate(SUITES):
        if suite is _monte_carlo and config.skip_monte_carlo:
            result = SuiteResult("oracle", "monte-carlo-3-sigma", 0, 0.0, 3.0, skipped=True)
        else:
            result = _run_suite(suite, config, root.spawn(index))
        results.append(result)
        if report is not None:
            report(result)
    return results


def format_result(result: SuiteResult) -> str:
    if result.skipped:
        return f"[verify] {result.label} ... SKIPPED"
    status = "PASS" if result.passed else "FAIL"
    line = (
        f"[verify] {result.label} ... {status} "
        f"({result.cases} cases, worst residual {result.worst_residual:.3e}, tolerance {result.tolerance:.0e})"
    )
    if not result.passed:
        line += f"\n  {result.failures} failing case(s); first: {result.counterexample}"
    return line


# report

REPORTED_PACKAGES = ("numpy", "pydantic", "orjson")


def _requirement_name(requirement: str) -> str | None:
    match = re.match(r"\s*([A-Za-z0-9][A-Za-z0-9._-]*)", requirement)
    return match.group(1) if match else None


def library_versions(pyproject: Path) -> dict[str, str]:
    """Installed version of each runtime dependency declared in ``pyproject``."""
    names: list[str] = list(REPORTED_PACKAGES)
    if pyproject.exists():
        with pyproject.open("rb") as handle:
            requirements = tomllib.load(handle).get("project", {}).get("dependencies", [])
        names = [name for name in map(_requirement_name, requirements) if name]
    versions: dict[str, str] = {}
    for name in names:
        try:
            versions[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            versions[name] = "not installed"
    return versions


def generate_markdown_report(
    results: list[SuiteResult],
    config: VerifyConfig,
    project_versions: dict[str, str] | None = None,
    python_version: str | None = None,
) -> str:
    """Generate markdown verification report."""
    lines = [
        "# Verification Results",
        "",
        f"**Date:** {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}",
        "",
        "## Configuration",
        "",
        f"- Seed: {config.seed}",
        f"- Cases per suite: {config.cases}",
        f"- Workers: {config.workers}",
        f"- Tolerance: {config.tolerance:.0e} (eigen-derived: {config.eigen_tolerance:.0e})",
        f"- Monte Carlo: {'skipped' if config.skip_monte_carlo else f'{config.monte_carlo_cases} cases x {config.monte_carlo_draws} draws'}",
        *([f"- Python: {python_version}"] if python_version else []),
        "",
        "## Results",
        "",
        "| Suite | Status | Cases | Worst residual | Tolerance |",
        "|-------|--------|------:|---------------:|----------:|",
    ]
    for r in results:
        status = "skipped" if r.skipped else ("pass" if r.passed else "FAIL")
        lines.append(f"| {r.label} | {status} | {r.cases} | {r.worst_residual:.3e} | {r.tolerance:.0e} |")
    lines.append("")

    failed = [r for r in results if not r.passed]
    if failed:
        lines.extend(["## Counterexamples", ""])
        for r in failed:
            lines.append(f"- `{r.label}`: {r.counterexample}")
        lines.append("")

    if project_versions:
        lines.extend([
            "## Library Versions",
            "",
            "| Package | Version |",
            "|---------|---------|",
        ])
        for package in sorted(project_versions.keys()):
            lines.append(f"| {package} | {project_versions[package]} |")
        lines.append("")

    return "\n".join(lines)
