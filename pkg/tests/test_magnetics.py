import math
from dataclasses import replace

import numpy as np
import pytest

from hybridlattice.core_types import FluxQubitSpec
from hybridlattice.errors import RangeError, SingularPosition
from hybridlattice.magnetics import (
    collective_coupling,
    coupling_profile,
    loop_field,
    profile_grid,
    single_spin_coupling,
)

SQUARE_LOOP = FluxQubitSpec(0.5, 1.0, 1.0, tunneling_energy=6.0)
WIDE_LOOP = FluxQubitSpec(0.5, 2.0, 10.0, tunneling_energy=6.0)
LONG_LOOP = FluxQubitSpec(0.9, 2.0, 50.0, tunneling_energy=6.0)


@pytest.mark.parametrize(
    'qubit, expected',
    ((SQUARE_LOOP, 2.32e-7), (WIDE_LOOP, 3.52e-7), (LONG_LOOP, 6.40e-7)),
)
def test_loop_field_quarter_micron(qubit, expected):
    assert abs(loop_field(qubit, 0.25)) == pytest.approx(expected, rel=5e-3)


@pytest.mark.parametrize('z', (0.0, -0.25, float('nan')))
def test_loop_field_singular(z):
    with pytest.raises(SingularPosition):
        loop_field(SQUARE_LOOP, z)


def test_loop_field_linear_in_current():
    z = np.linspace(0.05, 3.0, 25)
    doubled = replace(SQUARE_LOOP, persistent_current=1.0)
    assert np.allclose(loop_field(doubled, z), 2 * loop_field(SQUARE_LOOP, z))


@pytest.mark.parametrize('qubit', (SQUARE_LOOP, WIDE_LOOP, LONG_LOOP))
def test_loop_field_limits(qubit):
    reference = abs(loop_field(qubit, 0.25))
    assert abs(loop_field(qubit, 1e-6)) > 1e3 * reference
    assert abs(loop_field(qubit, 1e4)) < 1e-9 * reference


def test_loop_field_array_shape():
    values = loop_field(SQUARE_LOOP, np.array([0.1, 0.2, 0.3]))
    assert values.shape == (3,)
    assert isinstance(loop_field(SQUARE_LOOP, 0.2), float)


@pytest.mark.parametrize(
    'field, expected', ((0.0, 0.0), (2.32e-7, 4.6e-6), (6.40e-7, 1.27e-5))
)
def test_single_spin_coupling(field, expected):
    assert single_spin_coupling(field) == pytest.approx(
        expected, rel=1e-2, abs=1e-15
    )


def test_single_spin_coupling_uses_magnitude():
    assert single_spin_coupling(-2.32e-7) == single_spin_coupling(2.32e-7)


def test_collective_coupling_estimates(geometry):
    qubit, ensemble, expected = geometry
    estimate = collective_coupling(qubit, ensemble)
    assert estimate.collective_coupling == pytest.approx(expected, rel=0.3)
    assert estimate.collective_coupling == pytest.approx(expected, rel=0.05)
    assert estimate.collective_coupling == pytest.approx(
        math.sqrt(estimate.spin_count) * estimate.single_spin_coupling
    )
    assert estimate.spin_count == pytest.approx(3e6 * 5 * 0.5 * qubit.loop_b)
    assert min(estimate.to_dict().values()) >= 0


def test_profile_midpoint_matches_estimate(geometry):
    qubit, ensemble, _ = geometry
    [(point, value)] = coupling_profile(
        qubit, ensemble.crystal_width_L, profile_grid(1)
    )
    assert point == 0.5
    assert value == pytest.approx(
        collective_coupling(qubit, ensemble).single_spin_coupling, rel=1e-12
    )


def test_profile_decreases_towards_midpoint(geometry):
    qubit, ensemble, _ = geometry
    grid = np.linspace(0.005, 0.5, 100)
    values = [value for _, value in coupling_profile(qubit, 0.5, grid)]
    assert np.all(np.diff(values) < 0)
    assert values[0] > 10 * values[-1]


def test_profile_ordering_at_midpoint():
    values = [
        coupling_profile(qubit, 0.5, [0.5])[0][1]
        for qubit in (SQUARE_LOOP, WIDE_LOOP, LONG_LOOP)
    ]
    assert values[2] > values[1] > values[0]


@pytest.mark.parametrize('grid', ([0.0, 0.5], [0.5, 1.0], [-0.1], [1.5]))
def test_profile_range_error(grid):
    with pytest.raises(RangeError):
        coupling_profile(SQUARE_LOOP, 0.5, grid)


def test_profile_grid():
    assert profile_grid(1) == [0.5]
    grid = profile_grid(99)
    assert len(grid) == 99
    assert grid[0] == pytest.approx(0.01)
    assert grid[-1] == pytest.approx(0.99)
    with pytest.raises(RangeError):
        profile_grid(0)
