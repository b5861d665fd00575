"""JSON configuration files.

Every numeric key carries its unit suffix. A minimal two-qubit file::

    {
      "qubits": [{"persistent_current_uA": 0.5, "loop_a_um": 1,
                  "loop_b_um": 1, "tunneling_energy_GHz": 6}, ...],
      "ensembles": [{"crystal_width_L_um": 0.5,
                     "transition_frequency_GHz": 1}, ...],
      "couplings": [[0.25, 0.25, 0], [0, 0.25, 0.25]]
    }

"couplings" may instead be the string "from-geometry".
"""
import json
import logging

from hybridlattice.core_types import (
    ChainSpec,
    FluxQubitSpec,
    PhysicalConstants,
    SpinEnsembleSpec,
    field_for_nu_s,
)
from hybridlattice.errors import ConfigError
from hybridlattice.lattice import DEFAULT_SITES, LatticeParams, lattice_g
from hybridlattice.magnetics import collective_coupling
from hybridlattice.utils import dumps

logger = logging.getLogger(__name__)

FROM_GEOMETRY = 'from-geometry'

CONSTANT_KEYS = {
    'mu0_T_m_per_A': 'mu0',
    'muB_over_h_GHz_per_T': 'muB_over_h',
    'g_e': 'g_e',
    'D_GHz': 'D_default',
}
QUBIT_KEYS = {
    'persistent_current_uA': 'persistent_current',
    'loop_a_um': 'loop_a',
    'loop_b_um': 'loop_b',
    'tunneling_energy_GHz': 'tunneling_energy',
    'energy_bias_GHz': 'energy_bias',
}
QUBIT_REQUIRED = (
    'persistent_current_uA',
    'loop_a_um',
    'loop_b_um',
    'tunneling_energy_GHz',
)
ENSEMBLE_KEYS = {
    'crystal_width_L_um': 'crystal_width_L',
    'zero_field_splitting_GHz': 'zero_field_splitting',
    'external_field_T': 'external_field',
    'density_per_um3': 'density',
    'crystal_height_um': 'crystal_height',
    'crystal_length_um': 'crystal_length',
}
TRANSITION_KEY = 'transition_frequency_GHz'
LATTICE_KEYS = ('nu_s_GHz', 'g_GHz', 'sites')
TOP_LEVEL_KEYS = (
    'description',
    'constants',
    'qubits',
    'ensembles',
    'couplings',
    'mutual_inductance_coupling_GHz',
    'lattice',
)


def _number(value, key):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(key, f'must be a number, got {value!r}')
    return float(value)


def _section(data, key, kind):
    if not isinstance(data, kind):
        raise ConfigError(key, f'must be a JSON {kind.__name__}')
    return data


def _check_keys(data, allowed, prefix):
    for key in data:
        if key not in allowed:
            raise ConfigError(f'{prefix}{key}', 'unknown key')


def _build(cls, values, key_map, prefix):
    """Calls cls(**values), renaming field errors to their JSON keys."""
    try:
        return cls(**values)
    except ConfigError as exc:
        reverse = {field: key for key, field in key_map.items()}
        json_key = reverse.get(exc.key, exc.key)
        raise ConfigError(f'{prefix}{json_key}', exc.message)


def load_config(path):
    """Reads a JSON configuration file into a dictionary.

    :param path: Path to the file
    :type path: str or pathlib.Path
    :raises ConfigError:
    :rtype: dict
    """
    try:
        with open(path, 'r') as config_file:
            data = json.load(config_file)
    except OSError as exc:
        raise ConfigError(str(path), f'cannot be read ({exc.strerror})')
    except json.JSONDecodeError as exc:
        raise ConfigError(
            str(path), f'malformed JSON at line {exc.lineno}: {exc.msg}'
        )
    return _section(data, str(path), dict)


def constants_from_dict(data):
    """Builds PhysicalConstants from an optional "constants" section.

    :type data: dict or None
    :raises ConfigError:
    :rtype: PhysicalConstants
    """
    if data is None:
        return PhysicalConstants()
    _section(data, 'constants', dict)
    _check_keys(data, CONSTANT_KEYS, 'constants.')
    values = {
        CONSTANT_KEYS[key]: _number(value, f'constants.{key}')
        for key, value in data.items()
    }
    return _build(PhysicalConstants, values, CONSTANT_KEYS, 'constants.')


def qubit_from_dict(data, index):
    """Builds one FluxQubitSpec from its JSON object.

    :raises ConfigError:
    :rtype: FluxQubitSpec
    """
    prefix = f'qubits[{index}].'
    _section(data, prefix[:-1], dict)
    _check_keys(data, QUBIT_KEYS, prefix)
    for key in QUBIT_REQUIRED:
        if key not in data:
            raise ConfigError(f'{prefix}{key}', 'is required')
    values = {
        QUBIT_KEYS[key]: _number(value, f'{prefix}{key}')
        for key, value in data.items()
    }
    return _build(FluxQubitSpec, values, QUBIT_KEYS, prefix)


def ensemble_from_dict(data, index, constants):
    """Builds one SpinEnsembleSpec from its JSON object.

    A "transition_frequency_GHz" key is turned into the external field
    that produces it.

    :raises ConfigError:
    :rtype: SpinEnsembleSpec
    """
    prefix = f'ensembles[{index}].'
    _section(data, prefix[:-1], dict)
    _check_keys(data, (*ENSEMBLE_KEYS, TRANSITION_KEY), prefix)
    if 'crystal_width_L_um' not in data:
        raise ConfigError(f'{prefix}crystal_width_L_um', 'is required')
    values = {
        ENSEMBLE_KEYS[key]: _number(value, f'{prefix}{key}')
        for key, value in data.items()
        if key != TRANSITION_KEY
    }
    values.setdefault('zero_field_splitting', constants.D_default)
    if TRANSITION_KEY in data:
        if 'external_field_T' in data:
            raise ConfigError(
                f'{prefix}{TRANSITION_KEY}',
                'give either external_field_T or transition_frequency_GHz',
            )
        nu_s = _number(data[TRANSITION_KEY], f'{prefix}{TRANSITION_KEY}')
        if nu_s <= 0:
            raise ConfigError(
                f'{prefix}{TRANSITION_KEY}', f'must be positive, got {nu_s}'
            )
        values['external_field'] = field_for_nu_s(
            nu_s, values['zero_field_splitting'], constants
        )
    return _build(SpinEnsembleSpec, values, ENSEMBLE_KEYS, prefix)


def geometry_couplings(qubits, ensembles, constants):
    """Estimates J_ij for every adjoining pair from the device geometry.

    :rtype: list
    """
    couplings = [[0.0] * len(ensembles) for _ in qubits]
    for i, qubit in enumerate(qubits):
        for j in (i, i + 1):
            if j < len(ensembles):
                couplings[i][j] = collective_coupling(
                    qubit, ensembles[j], constants
                ).collective_coupling
    return couplings


def chain_from_dict(data):
    """Builds a validated ChainSpec from a configuration dictionary.

    :param data: Parsed JSON
    :type data: dict
    :raises ConfigError:
    :rtype: ChainSpec
    """
    _section(data, 'config', dict)
    _check_keys(data, TOP_LEVEL_KEYS, '')
    for key in ('qubits', 'ensembles', 'couplings'):
        if key not in data:
            raise ConfigError(key, 'is required')
    constants = constants_from_dict(data.get('constants'))
    qubits = [
        qubit_from_dict(item, index)
        for index, item in enumerate(_section(data['qubits'], 'qubits', list))
    ]
    ensembles = [
        ensemble_from_dict(item, index, constants)
        for index, item in enumerate(
            _section(data['ensembles'], 'ensembles', list)
        )
    ]
    couplings = data['couplings']
    if couplings == FROM_GEOMETRY:
        if len(ensembles) != len(qubits) + 1:
            raise ConfigError(
                'ensembles', f'{len(qubits)} qubits need {len(qubits) + 1}'
            )
        couplings = geometry_couplings(qubits, ensembles, constants)
        logger.info('Couplings from geometry: %s', couplings)
    elif isinstance(couplings, list):
        couplings = [
            [
                _number(value, f'couplings[{i}][{j}]')
                for j, value in enumerate(
                    _section(row, f'couplings[{i}]', list)
                )
            ]
            for i, row in enumerate(couplings)
        ]
    else:
        raise ConfigError(
            'couplings', f'must be a matrix or "{FROM_GEOMETRY}"'
        )
    mutual = _number(
        data.get('mutual_inductance_coupling_GHz', 0.0),
        'mutual_inductance_coupling_GHz',
    )
    try:
        return ChainSpec(
            qubits=qubits,
            ensembles=ensembles,
            couplings=couplings,
            mutual_inductance_coupling=mutual,
            constants=constants,
        )
    except ConfigError as exc:
        if exc.key == 'mutual_inductance_coupling':
            raise ConfigError(
                'mutual_inductance_coupling_GHz',
                exc.message,
            )
        if exc.key.endswith('.external_field'):
            raise ConfigError(
                exc.key + '_T', exc.message
            )
        raise


def parse_config(path):
    """Parses a JSON configuration file into a ChainSpec.

    :param path: Path to the file
    :type path: str or pathlib.Path
    :raises ConfigError:
    :rtype: ChainSpec
    """
    logger.debug('Parsing configuration %s', path)
    return chain_from_dict(load_config(path))


def chain_to_dict(chain):
    """Dumps a ChainSpec to the configuration schema.

    Couplings are written as the resolved matrix and ensembles with their
    resolved external field, so parsing the result rebuilds an equal ChainSpec.

    :type chain: ChainSpec
    :rtype: dict
    """
    constants = {
        key: getattr(chain.constants, field)
        for key, field in CONSTANT_KEYS.items()
    }
    qubits = [
        {key: getattr(qubit, field) for key, field in QUBIT_KEYS.items()}
        for qubit in chain.qubits
    ]
    ensembles = []
    for ensemble in chain.ensembles:
        item = {
            key: getattr(ensemble, field)
            for key, field in ENSEMBLE_KEYS.items()
        }
        if item['crystal_length_um'] is None:
            del item['crystal_length_um']
        ensembles.append(item)
    return {
        'constants': constants,
        'qubits': qubits,
        'ensembles': ensembles,
        'couplings': [list(row) for row in chain.couplings],
        'mutual_inductance_coupling_GHz': chain.mutual_inductance_coupling,
    }


def serialize_config(chain):
    """Dumps a ChainSpec to configuration JSON.

    :type chain: ChainSpec
    :rtype: str
    """
    return dumps(chain_to_dict(chain))


def lattice_params_from_dict(data, chain):
    """Resolves the periodic-array parameters.

    Missing "lattice" values derive from the chain: nu_s of the first
    ensemble and g = J^2 (1/Delta + 1/Lambda) with J_11 and nu_q1.

    :param data: Parsed configuration
    :type data: dict
    :param chain: Chain parsed from the same configuration
    :type chain: ChainSpec
    :raises ConfigError:
    :raises ResonanceError:
    :rtype: LatticeParams
    """
    section = _section(data.get('lattice', {}), 'lattice', dict)
    _check_keys(section, LATTICE_KEYS, 'lattice.')
    if 'nu_s_GHz' in section:
        nu_s = _number(section['nu_s_GHz'], 'lattice.nu_s_GHz')
    else:
        nu_s = chain.nu_s[0]
    if 'g_GHz' in section:
        g = _number(section['g_GHz'], 'lattice.g_GHz')
    else:
        g = lattice_g(chain.couplings[0][0], chain.nu_q[0], nu_s)
    sites = section.get('sites', DEFAULT_SITES)
    if isinstance(sites, bool) or not isinstance(sites, int):
        raise ConfigError(
            'lattice.sites', f'must be an integer, got {sites!r}'
        )
    try:
        return LatticeParams(nu_s=nu_s, g=g, N=sites)
    except ConfigError as exc:
        key = {'nu_s': 'nu_s_GHz', 'g': 'g_GHz', 'N': 'sites'}.get(
            exc.key, exc.key
        )
        raise ConfigError(f'lattice.{key}', exc.message)
