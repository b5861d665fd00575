from pathlib import Path

import numpy as np
import pytest

from hybridlattice.core_types import (
    ChainSpec,
    FluxQubitSpec,
    PhysicalConstants,
    SpinEnsembleSpec,
    field_for_nu_s,
)
from hybridlattice.lattice import LatticeParams, lattice_g

DATA_DIR = Path(__file__).parent.joinpath('data')

UNIFORM_J = 0.25
UNIFORM_NU_Q = 6.0
UNIFORM_NU_S = 1.0
UNIFORM_G = lattice_g(UNIFORM_J, UNIFORM_NU_Q, UNIFORM_NU_S)

GEOMETRIES = (
    # (Ip uA, a um, b um, expected J GHz)
    (0.5, 1.0, 1.0, 0.013),
    (0.5, 2.0, 10.0, 0.060),
    (0.9, 2.0, 50.0, 0.250),
)


def make_ensemble(nu_s=UNIFORM_NU_S, width=0.5):
    return SpinEnsembleSpec(
        crystal_width_L=width,
        external_field=field_for_nu_s(nu_s, 2.87, PhysicalConstants()),
    )


def make_chain(
    nu_q=UNIFORM_NU_Q,
    nu_s=UNIFORM_NU_S,
    couplings=None,
    n_qubits=2,
    mutual=0.0,
):
    """Builds a chain with tunable frequencies; scalars apply to all."""
    if np.ndim(nu_q) == 0:
        nu_q = [nu_q] * n_qubits
    if np.ndim(nu_s) == 0:
        nu_s = [nu_s] * (n_qubits + 1)
    if couplings is None:
        couplings = [
            [
                UNIFORM_J if j in (i, i + 1) else 0.0
                for j in range(n_qubits + 1)
            ]
            for i in range(n_qubits)
        ]
    qubits = [
        FluxQubitSpec(
            persistent_current=0.5,
            loop_a=1.0,
            loop_b=1.0,
            tunneling_energy=value,
        )
        for value in nu_q
    ]
    return ChainSpec(
        qubits=qubits,
        ensembles=[make_ensemble(value) for value in nu_s],
        couplings=couplings,
        mutual_inductance_coupling=mutual,
    )


@pytest.fixture(scope='session')
def uniform_chain():
    return make_chain()


@pytest.fixture(scope='session')
def uniform_lattice():
    return LatticeParams(nu_s=UNIFORM_NU_S, g=UNIFORM_G, N=64)


@pytest.fixture(params=GEOMETRIES, ids=('small', 'wide', 'long'))
def geometry(request):
    current, loop_a, loop_b, expected = request.param
    qubit = FluxQubitSpec(
        persistent_current=current,
        loop_a=loop_a,
        loop_b=loop_b,
        tunneling_energy=UNIFORM_NU_Q,
    )
    return qubit, make_ensemble(), expected


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def data_path():
    return DATA_DIR.joinpath
