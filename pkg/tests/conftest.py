from __future__ import annotations

import math

import pytest

from entangle_sphere.entangle import TwoQubitState
from entangle_sphere.oracle import RandomSource


@pytest.fixture
def rng() -> RandomSource:
    return RandomSource(7)


@pytest.fixture
def singlet() -> TwoQubitState:
    return TwoQubitState.singlet()


@pytest.fixture
def product_00() -> TwoQubitState:
    return TwoQubitState.from_amplitudes([1, 0, 0, 0])


@pytest.fixture
def schmidt_06_08() -> TwoQubitState:
    """0.6|00> + 0.8|11>, r = 0.28."""
    return TwoQubitState.from_amplitudes([0.6, 0, 0, 0.8])


@pytest.fixture
def cone_06() -> TwoQubitState:
    """sqrt(0.8)|00> + sqrt(0.2)|11>, r = 0.6."""
    return TwoQubitState.from_amplitudes([math.sqrt(0.8), 0, 0, math.sqrt(0.2)])
