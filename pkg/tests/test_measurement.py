from __future__ import annotations

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from entangle_sphere import bloch, entangle, linalg, measurement, oracle
from entangle_sphere.bloch import MeasurementDirection, SpinPureState
from entangle_sphere.errors import DegenerateImageError, SphereModelError
from entangle_sphere.measurement import Frame, SchmidtFrames

Z = MeasurementDirection(0.0, 0.0)


def test_singlet_collapses_to_opposite_direction(singlet, rng):
    up, down = measurement.collapse_on_first(singlet, Z)
    assert (up.probability, down.probability) == pytest.approx((0.5, 0.5))
    assert linalg.same_ray(up.collapsed_second, [0, 1])
    assert linalg.same_ray(down.collapsed_second, [1, 0])
    for _ in range(20):
        direction = oracle.random_direction(rng)
        result = measurement.collapse_on_first(singlet, direction)[0]
        assert result.probability == pytest.approx(0.5)
        assert_allclose(bloch.bloch_vector(result.collapsed_second), -direction.axis, atol=1e-12)


def test_product_outcome_can_be_impossible(product_00):
    up, down = measurement.collapse_on_first(product_00, Z)
    assert up.probability == pytest.approx(1.0)
    assert down.impossible
    assert down.probability == 0.0
    assert down.collapsed_second is None
    assert down.joint_state is None


def test_collapse_probabilities_are_squared_amplitudes(schmidt_06_08):
    for side in (1, 2):
        up, down = measurement.collapse(schmidt_06_08, Z, side)
        assert up.probability == pytest.approx(0.36, abs=1e-12)
        assert down.probability == pytest.approx(0.64, abs=1e-12)
        assert up.measured_side == side


def test_collapse_of_second_spin_matches_oracle(rng):
    for _ in range(50):
        psi, direction = oracle.random_two_qubit_state(rng), oracle.random_direction(rng)
        for primary, reference in zip(
            measurement.collapse(psi, direction, side=2), oracle.brute_force_collapse(psi, direction, side=2)
        ):
            assert primary.probability == pytest.approx(reference.probability, abs=1e-12)
            assert linalg.same_ray(primary.joint_state, reference.post)


def test_collapse_rejects_bad_side(singlet):
    with pytest.raises(SphereModelError):
        measurement.collapse(singlet, Z, side=3)


def test_luder_leaves_remote_spin_alone(rng):
    for _ in range(50):
        psi, direction = oracle.random_two_qubit_state(rng), oracle.random_direction(rng)
        for side in (1, 2):
            before, after = measurement.remote_invariance_check(psi, direction, measured=side)
            assert_allclose(after, before, atol=1e-12)


def test_luder_on_first_measured_side_follows_projection(rng):
    for _ in range(50):
        psi, direction = oracle.random_two_qubit_state(rng), oracle.random_direction(rng)
        for side in (1, 2):
            actual = linalg.partial_trace(measurement.luder(psi, direction, side), keep=side)
            assert_allclose(measurement.measured_side_prediction(psi, direction, side), actual, atol=1e-9)


def test_luder_along_x_dephases_diagonal_state(schmidt_06_08):
    x_axis = MeasurementDirection(math.pi / 2, 0.0)
    after = measurement.luder_on_first(schmidt_06_08, x_axis)
    assert_allclose(linalg.partial_trace(after, keep=1), np.eye(2) / 2, atol=1e-12)
    assert_allclose(linalg.partial_trace(after, keep=2), np.diag([0.36, 0.64]), atol=1e-12)


def test_luder_on_product_along_its_axis_changes_nothing(product_00):
    after = measurement.luder_on_first(product_00, Z)
    assert_allclose(after, product_00.density, atol=1e-15)


def test_schmidt_frames_round_trip(rng):
    form = entangle.schmidt_decompose(oracle.random_two_qubit_state(rng))
    frames = SchmidtFrames(form)
    v = oracle.random_spin_state(rng).vector
    for side in (1, 2):
        assert_allclose(frames.from_frame(side, frames.to_frame(side, v)), v, atol=1e-12)
    assert_allclose(frames.to_frame(1, form.basis1[0]), [1, 0], atol=1e-12)
    assert_allclose(frames.to_frame(2, form.basis2[1]), [0, 1], atol=1e-12)


@pytest.mark.parametrize("theta", [0.0, 0.7, math.pi / 2, 2.5, math.pi])
def test_image_laws(cone_06, theta):
    r = 0.6
    image = measurement.normalized_image(cone_06, SpinPureState(theta, 1.1))
    assert image.norm2 == pytest.approx((1 + r * math.cos(theta)) / 2, abs=1e-12)
    assert image.axis_projection == pytest.approx((r + math.cos(theta)) / (1 + r * math.cos(theta)), abs=1e-12)
    assert image.schmidt_overlap == pytest.approx(measurement.overlap_law(r, theta), abs=1e-12)


def test_image_azimuth_is_reflected(cone_06):
    image = measurement.normalized_image(cone_06, SpinPureState(1.0, 0.9))
    assert image.phi2 == pytest.approx(2 * math.pi - 0.9)


def test_singlet_image_is_antipode_in_input_frame(singlet, rng):
    for _ in range(20):
        x = oracle.random_spin_state(rng)
        image = measurement.normalized_image(singlet, x, frame=Frame.INPUT)
        antipode = x.antipode()
        assert image.theta2 == pytest.approx(antipode.theta, abs=1e-9)
        assert math.remainder(image.phi2 - antipode.phi, 2 * math.pi) == pytest.approx(0.0, abs=1e-9)


def test_product_south_pole_image_is_degenerate(product_00):
    image = measurement.normalized_image(product_00, SpinPureState(math.pi, 0.0))
    assert image.degenerate
    assert math.isnan(image.theta2)
    assert np.isnan(image.cartesian).all()


def test_equator_maps_onto_cone(singlet, cone_06):
    cone = measurement.cone_of_equator(cone_06)
    assert cone.beta == pytest.approx(math.acos(0.6))
    assert cone.max_residual <= 1e-12
    assert measurement.cone_of_equator(singlet).beta == pytest.approx(math.pi / 2)


def test_line_images_pass_through_pivot(rng):
    for _ in range(50):
        psi = oracle.random_two_qubit_state(rng)
        line = measurement.line_image_check(psi, oracle.random_spin_state(rng))
        assert line.cross_norm <= 1e-9


def test_line_images_need_entanglement(product_00):
    with pytest.raises(DegenerateImageError):
        measurement.line_image_check(product_00, SpinPureState(1.0, 0.0))


def test_orthogonality_images(singlet, cone_06):
    x = SpinPureState(1.2, 0.3)
    value = measurement.orthogonality_image(cone_06, x)
    assert value == pytest.approx(1j * 0.6 * math.sin(1.2) / 2, abs=1e-12)
    assert abs(value) == pytest.approx(measurement.orthogonality_closed_form(0.6, 1.2))
    assert abs(measurement.orthogonality_image(singlet, x)) <= 1e-12


def test_deformation_grid_layout(cone_06):
    grid = measurement.sphere_deformation_grid(cone_06, 5, 8)
    assert grid.rows.shape == (40, 6)
    assert grid.columns == measurement.GRID_COLUMNS
    assert_allclose(grid.rows[:8, 0], 0.0)
    assert_allclose(grid.rows[:8, 1], 2 * math.pi * np.arange(8) / 8)
    equator = grid.rows[16:24]
    assert_allclose(equator[:, 0], math.pi / 2)
    assert_allclose(equator[:, 5], 0.6, atol=1e-12)
    assert grid.beta == pytest.approx(math.acos(0.6))


def test_deformation_grid_of_singlet_keeps_equator(singlet):
    grid = measurement.sphere_deformation_grid(singlet, 5, 8)
    assert_allclose(grid.rows[16:24, 5], 0.0, atol=1e-12)


def test_deformation_grid_marks_degenerate_rows(product_00):
    grid = measurement.sphere_deformation_grid(product_00, 3, 2)
    assert np.isnan(grid.rows[4:, 2]).all()
    assert not np.isnan(grid.rows[:4, 2]).any()


def test_deformation_grid_rejects_small_counts(singlet):
    with pytest.raises(SphereModelError):
        measurement.sphere_deformation_grid(singlet, 1, 8)
    with pytest.raises(SphereModelError):
        measurement.sphere_deformation_grid(singlet, 5, 0)


@pytest.mark.parametrize("one_minus_r", [1e-6, 1e-8, 2e-10])
def test_line_images_of_nearly_product_states(rng, one_minus_r):
    r = 1.0 - one_minus_r
    core = np.array([math.sqrt((1 + r) / 2), 0, 0, math.sqrt((1 - r) / 2)])
    for _ in range(100):
        local = np.kron(oracle.random_unitary2(rng), oracle.random_unitary2(rng))
        psi = entangle.TwoQubitState.normalized(local @ core)
        x = SpinPureState(0.3 + (math.pi - 0.6) * rng.uniform(), 2 * math.pi * rng.uniform())
        line = measurement.line_image_check(psi, x)
        assert line.cross_norm <= 1e-9
        image = measurement.normalized_image(psi, x)
        assert image.norm2 == pytest.approx(measurement.norm_law(r, x.theta), abs=1e-9)
