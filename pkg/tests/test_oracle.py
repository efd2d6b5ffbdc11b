from __future__ import annotations

import numpy as np
import pytest
from numpy.testing import assert_allclose

from entangle_sphere import entangle, linalg, measurement, oracle
from entangle_sphere.bloch import MeasurementDirection
from entangle_sphere.errors import SphereModelError
from entangle_sphere.oracle import EmpiricalDistribution, RandomSource

Z = MeasurementDirection(0.0, 0.0)


def test_random_source_is_reproducible():
    first = oracle.random_two_qubit_state(RandomSource(42))
    second = oracle.random_two_qubit_state(RandomSource(42))
    assert np.array_equal(first.vector, second.vector)
    other = oracle.random_two_qubit_state(RandomSource(43))
    assert not np.array_equal(first.vector, other.vector)


def test_spawn_depends_only_on_key():
    source = RandomSource(5)
    child = source.spawn(3)
    source.normal(10)
    assert np.array_equal(child.normal(4), source.spawn(3).normal(4))
    assert child.key == (3,)


def test_seed_must_be_unsigned_64_bit():
    with pytest.raises(SphereModelError):
        RandomSource(-1)
    with pytest.raises(SphereModelError):
        RandomSource(2**64)


def test_random_states_are_unit(rng):
    for _ in range(100):
        assert np.linalg.norm(oracle.random_two_qubit_state(rng).vector) == pytest.approx(1.0, abs=1e-12)


def test_random_unitary(rng):
    for _ in range(20):
        u = oracle.random_unitary2(rng)
        assert_allclose(u.conj().T @ u, np.eye(2), atol=1e-12)


def test_random_bloch_points_stay_in_ball(rng):
    assert all(oracle.random_bloch_point(rng).r <= 1.0 for _ in range(100))


def test_brute_force_collapse_singlet(singlet):
    up, down = oracle.brute_force_collapse(singlet, Z)
    assert (up.probability, down.probability) == pytest.approx((0.5, 0.5))
    assert linalg.same_ray(up.post, [0, 1, 0, 0])
    assert linalg.same_ray(down.post, [0, 0, 1, 0])


def test_brute_force_collapse_product(product_00):
    up, down = oracle.brute_force_collapse(product_00, Z)
    assert up.probability == pytest.approx(1.0)
    assert down.probability == 0.0
    assert down.impossible


def test_brute_force_collapse_diagonal_state(schmidt_06_08):
    up, down = oracle.brute_force_collapse(schmidt_06_08, Z)
    assert (up.probability, down.probability) == pytest.approx((0.36, 0.64))


def test_brute_force_schmidt_landmarks(singlet, product_00, schmidt_06_08):
    assert oracle.brute_force_schmidt(singlet).r == pytest.approx(0.0, abs=1e-12)
    assert oracle.brute_force_schmidt(product_00).r == pytest.approx(1.0, abs=1e-12)
    result = oracle.brute_force_schmidt(schmidt_06_08)
    assert result.singular_values == pytest.approx((0.8, 0.6))
    assert result.r == pytest.approx(0.28, abs=1e-12)


def test_oracle_agrees_with_constraint_functions(rng):
    for _ in range(100):
        psi, direction = oracle.random_two_qubit_state(rng), oracle.random_direction(rng)
        assert entangle.entanglement_parameter(psi) == pytest.approx(oracle.brute_force_schmidt(psi).r, abs=1e-9)
        for primary, reference in zip(
            measurement.collapse_on_first(psi, direction), oracle.brute_force_collapse(psi, direction)
        ):
            assert primary.probability == pytest.approx(reference.probability, abs=1e-12)
            assert linalg.same_ray(primary.joint_state, reference.post)


def test_monte_carlo_singlet_within_three_sigma(singlet):
    dist = oracle.monte_carlo_outcomes(singlet, Z, 100_000, RandomSource(42))
    assert dist.total == 100_000
    assert dist.within_sigma(1, 0.5)
    assert abs(dist.frequency(1) - 0.5) <= 0.005


def test_monte_carlo_certain_outcome(product_00):
    dist = oracle.monte_carlo_outcomes(product_00, Z, 1000, RandomSource(1), workers=3)
    assert dist.counts == {1: 1000, -1: 0}
    assert dist.within_sigma(1, 1.0)


def test_monte_carlo_schmidt_direction(schmidt_06_08):
    # +z is the second Schmidt direction of spin 1, probability (1 - r) / 2 = 0.36
    dist = oracle.monte_carlo_outcomes(schmidt_06_08, Z, 100_000, RandomSource(11))
    assert dist.within_sigma(-1, 0.64)


def test_monte_carlo_is_deterministic_per_worker_count(cone_06):
    direction = MeasurementDirection(1.0, 2.0)
    runs = [oracle.monte_carlo_outcomes(cone_06, direction, 5000, RandomSource(9), workers=4) for _ in range(2)]
    assert runs[0].counts == runs[1].counts


def test_monte_carlo_needs_draws(singlet):
    with pytest.raises(SphereModelError):
        oracle.monte_carlo_outcomes(singlet, Z, 0, RandomSource(1))


def test_empirical_distribution_validation():
    with pytest.raises(SphereModelError):
        EmpiricalDistribution(counts={1: 3, -1: 3}, total=5)
    with pytest.raises(SphereModelError):
        EmpiricalDistribution(counts={}, total=0)
    dist = EmpiricalDistribution(counts={1: 30, -1: 70}, total=100)
    assert dist.frequency(-1) == 0.7
    assert dist.frequency(5) == 0.0
