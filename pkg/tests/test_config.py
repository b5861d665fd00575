import copy
import json

import pytest

from conftest import UNIFORM_G, make_chain
from hybridlattice.config import (
    FROM_GEOMETRY,
    chain_from_dict,
    chain_to_dict,
    lattice_params_from_dict,
    load_config,
    parse_config,
    serialize_config,
)
from hybridlattice.core_types import PhysicalConstants
from hybridlattice.errors import ConfigError

QUBIT = {
    'persistent_current_uA': 0.5,
    'loop_a_um': 1.0,
    'loop_b_um': 1.0,
    'tunneling_energy_GHz': 6.0,
}
ENSEMBLE = {'crystal_width_L_um': 0.5, 'transition_frequency_GHz': 1.0}


@pytest.fixture
def chain_data():
    return {
        'qubits': [dict(QUBIT)],
        'ensembles': [dict(ENSEMBLE), dict(ENSEMBLE)],
        'couplings': [[0.25, 0.25]],
    }


def _config_error(data):
    with pytest.raises(ConfigError) as exc_info:
        chain_from_dict(data)
    return exc_info.value


def test_parse_config(data_path):
    chain = parse_config(data_path('chain.json'))
    assert chain.n_qubits == 2
    assert chain.n_ensembles == 3
    assert chain.couplings == ((0.25, 0.25, 0.0), (0.0, 0.25, 0.25))
    assert chain.mutual_inductance_coupling == 0.0
    assert chain.nu_q == [6.0, 6.0]
    assert chain.nu_s == pytest.approx([1.0, 1.0, 1.0], abs=1e-12)
    assert chain.constants == PhysicalConstants()


def test_transition_frequency_sets_field(chain_data):
    chain = chain_from_dict(chain_data)
    expected = (2.87 - 1.0) / PhysicalConstants().zeeman_slope
    assert chain.ensembles[0].external_field == pytest.approx(expected)
    assert chain.ensembles[0].zero_field_splitting == 2.87


def test_zero_field_splitting_from_constants(chain_data):
    chain_data['constants'] = {'D_GHz': 3.0}
    chain = chain_from_dict(chain_data)
    assert chain.ensembles[0].zero_field_splitting == 3.0
    assert chain.nu_s[0] == pytest.approx(1.0, abs=1e-12)


def test_load_malformed(data_path):
    path = data_path('malformed.json')
    with pytest.raises(ConfigError) as exc_info:
        load_config(path)
    assert exc_info.value.key == str(path)
    assert 'malformed JSON' in exc_info.value.message


def test_load_missing(tmp_path):
    with pytest.raises(ConfigError) as exc_info:
        load_config(tmp_path.joinpath('absent.json'))
    assert 'cannot be read' in exc_info.value.message


@pytest.mark.parametrize(
    'path,value,key',
    (
        (('qubits', 0, 'persistent_current_uA'), -0.5,
         'qubits[0].persistent_current_uA'),
        (('qubits', 0, 'loop_b_um'), 'wide', 'qubits[0].loop_b_um'),
        (('ensembles', 1, 'density_per_um3'), 0.0,
         'ensembles[1].density_per_um3'),
        (('ensembles', 0, 'external_field_T'), 1.0,
         'ensembles[0].transition_frequency_GHz'),
        (('ensembles', 0, 'transition_frequency_GHz'), -1.0,
         'ensembles[0].transition_frequency_GHz'),
        (('couplings', 0, 0), -0.1, 'couplings[0][0]'),
        (('mutual_inductance_coupling_GHz',), 'x',
         'mutual_inductance_coupling_GHz'),
        (('constants',), {'g_e': 0}, 'constants.g_e'),
        (('constants',), {'hbar': 1}, 'constants.hbar'),
        (('lattice_sites',), 8, 'lattice_sites'),
        (('ensembles', 0, 'spin'), 1, 'ensembles[0].spin'),
    ),
)
def test_invalid_values(chain_data, path, value, key):
    target = chain_data
    for part in path[:-1]:
        target = target[part]
    target[path[-1]] = value
    assert _config_error(chain_data).key == key


def test_negative_splitting(chain_data):
    chain_data['ensembles'][0] = {
        'crystal_width_L_um': 0.5,
        'external_field_T': 1.0,
    }
    assert _config_error(chain_data).key == 'ensembles[0].external_field_T'


@pytest.mark.parametrize(
    'missing,key',
    (
        ('loop_a_um', 'qubits[0].loop_a_um'),
        ('tunneling_energy_GHz', 'qubits[0].tunneling_energy_GHz'),
    ),
)
def test_missing_qubit_key(chain_data, missing, key):
    del chain_data['qubits'][0][missing]
    assert _config_error(chain_data).key == key


@pytest.mark.parametrize('section', ('qubits', 'ensembles', 'couplings'))
def test_missing_section(chain_data, section):
    del chain_data[section]
    assert _config_error(chain_data).key == section


def test_ensemble_count(chain_data):
    chain_data['ensembles'].append(dict(ENSEMBLE))
    chain_data['couplings'] = FROM_GEOMETRY
    assert _config_error(chain_data).key == 'ensembles'


def test_forbidden_coupling(chain_data):
    chain_data['qubits'].append(dict(QUBIT))
    chain_data['ensembles'].append(dict(ENSEMBLE))
    chain_data['couplings'] = [[0.25, 0.25, 0.1], [0.0, 0.25, 0.25]]
    assert _config_error(chain_data).key == 'couplings[0][2]'


def test_couplings_from_geometry(chain_data):
    chain_data['couplings'] = FROM_GEOMETRY
    chain = chain_from_dict(chain_data)
    assert chain.couplings[0][0] == pytest.approx(0.01258, rel=1e-3)
    assert chain.couplings[0][0] == chain.couplings[0][1]


def test_round_trip(tmp_path):
    chain = make_chain(nu_q=[6.0, 7.5], nu_s=[1.0, 1.2, 0.9], mutual=0.05)
    path = tmp_path.joinpath('chain.json')
    path.write_text(serialize_config(chain))
    assert parse_config(path) == chain


def test_chain_to_dict_schema(uniform_chain):
    data = chain_to_dict(uniform_chain)
    assert set(data) == {
        'constants',
        'qubits',
        'ensembles',
        'couplings',
        'mutual_inductance_coupling_GHz',
    }
    assert 'crystal_length_um' not in data['ensembles'][0]
    assert data['qubits'][0]['tunneling_energy_GHz'] == 6.0
    json.dumps(data)


def test_lattice_defaults(data_path):
    data = load_config(data_path('chain.json'))
    params = lattice_params_from_dict(data, chain_from_dict(data))
    assert params.nu_s == pytest.approx(1.0, abs=1e-12)
    assert params.g == pytest.approx(UNIFORM_G, rel=1e-9)
    assert params.N == 64


def test_lattice_overrides(data_path):
    data = load_config(data_path('unstable-lattice.json'))
    params = lattice_params_from_dict(data, chain_from_dict(data))
    assert (params.nu_s, params.g, params.N) == (0.1, 0.0214, 32)


@pytest.mark.parametrize(
    'section,key',
    (
        ({'sites': 1}, 'lattice.sites'),
        ({'sites': 2.5}, 'lattice.sites'),
        ({'g_GHz': -0.1}, 'lattice.g_GHz'),
        ({'nu_s_GHz': 0.0, 'g_GHz': 0.01}, 'lattice.nu_s_GHz'),
        ({'nu_s_GHz': 'one'}, 'lattice.nu_s_GHz'),
        ({'N': 8}, 'lattice.N'),
    ),
)
def test_lattice_errors(chain_data, section, key):
    data = copy.deepcopy(chain_data)
    data['lattice'] = section
    with pytest.raises(ConfigError) as exc_info:
        lattice_params_from_dict(data, chain_from_dict(chain_data))
    assert exc_info.value.key == key
