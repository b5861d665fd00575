"""Physical constants, unit conventions and parameter records.

Units: frequencies in GHz (h = 1), fields in T, lengths in um, currents in uA.
All records are frozen dataclasses and safe to share between threads.
"""
import math
from dataclasses import dataclass, field, replace

from hybridlattice.errors import ConfigError, NonPositiveSplitting
from hybridlattice.utils import is_finite, obj_to_dict

MU0 = 4e-7 * math.pi
MUB_OVER_H = 13.996
G_E = 2.0028
D_NV = 2.87
CRYSTAL_HEIGHT = 5.0


def _require_positive(name, value):
    if not is_finite(value) or value <= 0:
        raise ConfigError(name, f'must be a positive number, got {value!r}')


@dataclass(frozen=True)
class PhysicalConstants(object):
    """Constants entering the coupling and splitting formulas."""

    mu0: float = MU0
    muB_over_h: float = MUB_OVER_H
    g_e: float = G_E
    D_default: float = D_NV

    def __post_init__(self):
        for name in ('mu0', 'muB_over_h', 'g_e', 'D_default'):
            _require_positive(name, getattr(self, name))

    @property
    def zeeman_slope(self):
        """Gets g_e * muB/h, the Zeeman shift per tesla.

        :return: Frequency per field (GHz/T)
        :rtype: float
        """
        return self.g_e * self.muB_over_h

    def to_dict(self):
        """Dumps self to dictionary.

        :rtype: dict
        """
        return obj_to_dict(self)


@dataclass(frozen=True)
class FluxQubitSpec(object):
    """A flux qubit with a rectangular loop of sides a (along z) and b."""

    persistent_current: float
    loop_a: float
    loop_b: float
    tunneling_energy: float
    energy_bias: float = 0.0

    def __post_init__(self):
        for name in (
            'persistent_current',
            'loop_a',
            'loop_b',
            'tunneling_energy',
        ):
            _require_positive(name, getattr(self, name))
        if not is_finite(self.energy_bias):
            raise ConfigError('energy_bias', 'must be a finite number')

    @property
    def nu_q(self):
        """Gets the qubit transition frequency sqrt(eps^2 + lambda^2).

        At the degeneracy point (energy_bias = 0) this is the tunneling
        energy.

        :return: Frequency (GHz)
        :rtype: float
        """
        return math.hypot(self.energy_bias, self.tunneling_energy)

    def to_dict(self):
        """Dumps self to dictionary.

        :rtype: dict
        """
        return obj_to_dict(self)


@dataclass(frozen=True)
class SpinEnsembleSpec(object):
    """An NV-center ensemble in a diamond crystal between two loops.

    crystal_length of None means "same as the adjoining loop's long side".
    """

    crystal_width_L: float
    zero_field_splitting: float = D_NV
    external_field: float = 0.0
    density: float = 3e6
    crystal_height: float = CRYSTAL_HEIGHT
    crystal_length: float = None

    def __post_init__(self):
        for name in (
            'crystal_width_L',
            'zero_field_splitting',
            'density',
            'crystal_height',
        ):
            _require_positive(name, getattr(self, name))
        if not is_finite(self.external_field):
            raise ConfigError('external_field', 'must be a finite number')
        if self.crystal_length is not None:
            _require_positive('crystal_length', self.crystal_length)

    def nu_s(self, constants=None):
        """See nu_s_from_field.__doc__."""
        return nu_s_from_field(self, constants)

    def spin_count(self, default_length=None):
        """Counts the NV centers: density x height x L x length.

        :param default_length: Length used when crystal_length is None (um)
        :type default_length: float or None
        :raises ConfigError:
        :return: Spin count n
        :rtype: float
        """
        length = self.crystal_length
        if length is None:
            length = default_length
        if length is None:
            raise ConfigError(
                'crystal_length', 'is required when no loop length is known'
            )
        n = self.density * self.crystal_height * self.crystal_width_L * length
        if n < 1:
            raise ConfigError(
                'density', f'ensemble holds fewer than one spin (n = {n:.3g})'
            )
        return n

    def to_dict(self):
        """Dumps self to dictionary.

        :rtype: dict
        """
        return obj_to_dict(self)


def nu_s_from_field(spec, constants=None):
    """Gets the m_s = 0 <-> -1 splitting D - g_e muB/h B_ext.

    :param spec: Spin ensemble
    :type spec: SpinEnsembleSpec
    :param constants: Physical constants, defaults to PhysicalConstants()
    :type constants: PhysicalConstants or None
    :raises NonPositiveSplitting:
    :return: Transition frequency (GHz)
    :rtype: float
    """
    constants = constants or PhysicalConstants()
    nu_s = spec.zero_field_splitting - constants.zeeman_slope * (
        spec.external_field
    )
    if nu_s <= 0:
        raise NonPositiveSplitting(
            f'D - g_e muB B_ext = {nu_s:.6g} GHz at B_ext = '
            f'{spec.external_field} T; the two-level reduction needs a '
            f'positive splitting'
        )
    return nu_s


def field_for_nu_s(nu_s, zero_field_splitting, constants=None):
    """Solves nu_s = D - g_e muB/h B for the external field.

    :param nu_s: Target transition frequency (GHz)
    :type nu_s: float
    :param zero_field_splitting: D (GHz)
    :type zero_field_splitting: float
    :param constants: Physical constants
    :type constants: PhysicalConstants or None
    :return: External field (T)
    :rtype: float
    """
    constants = constants or PhysicalConstants()
    return (zero_field_splitting - nu_s) / constants.zeeman_slope


@dataclass(frozen=True)
class ChainSpec(object):
    """Full device: Q flux qubits interleaved with Q + 1 spin ensembles.

    Qubit i (zero based) sits between ensembles i and i + 1 and couples only
    to them; couplings[i][j] is the collective coupling J_ij in GHz.
    """

    qubits: tuple
    ensembles: tuple
    couplings: tuple
    mutual_inductance_coupling: float = 0.0
    constants: PhysicalConstants = field(default_factory=PhysicalConstants)

    def __post_init__(self):
        object.__setattr__(self, 'qubits', tuple(self.qubits))
        object.__setattr__(self, 'ensembles', tuple(self.ensembles))
        if not self.qubits:
            raise ConfigError('qubits', 'at least one qubit is required')
        if len(self.ensembles) != len(self.qubits) + 1:
            raise ConfigError(
                'ensembles',
                f'{len(self.qubits)} qubits need {len(self.qubits) + 1} '
                f'ensembles, got {len(self.ensembles)}',
            )
        try:
            couplings = tuple(
                tuple(float(value) for value in row) for row in self.couplings
            )
        except (TypeError, ValueError):
            raise ConfigError('couplings', 'must be a matrix of numbers')
        object.__setattr__(self, 'couplings', couplings)
        if len(couplings) != len(self.qubits) or any(
            len(row) != len(self.ensembles) for row in couplings
        ):
            raise ConfigError(
                'couplings',
                f'expected a {len(self.qubits)}x{len(self.ensembles)} matrix',
            )
        for i, row in enumerate(couplings):
            for j, value in enumerate(row):
                if not is_finite(value) or value < 0:
                    raise ConfigError(
                        f'couplings[{i}][{j}]',
                        f'must be a non-negative number, got {value!r}',
                    )
                if value and j not in (i, i + 1):
                    raise ConfigError(
                        f'couplings[{i}][{j}]',
                        f'qubit {i + 1} couples only to ensembles {i + 1} '
                        f'and {i + 2}',
                    )
        if not is_finite(self.mutual_inductance_coupling):
            raise ConfigError(
                'mutual_inductance_coupling', 'must be a finite number'
            )
        for index, ensemble in enumerate(self.ensembles):
            try:
                nu_s_from_field(ensemble, self.constants)
            except NonPositiveSplitting as exc:
                raise ConfigError(
                    f'ensembles[{index}].external_field', str(exc)
                )

    @property
    def n_qubits(self):
        """Gets the number of qubits."""
        return len(self.qubits)

    @property
    def n_ensembles(self):
        """Gets the number of ensembles."""
        return len(self.ensembles)

    @property
    def nu_q(self):
        """Gets the qubit frequencies in index order (GHz)."""
        return [qubit.nu_q for qubit in self.qubits]

    @property
    def nu_s(self):
        """Gets the ensemble frequencies in index order (GHz)."""
        return [e.nu_s(self.constants) for e in self.ensembles]

    def adjoining_pairs(self):
        """Lists the (qubit, ensemble) pairs allowed to couple.

        For two qubits the order is (0, 0), (0, 1), (1, 1), (1, 2).

        :rtype: list
        """
        return [(i, j) for i in range(self.n_qubits) for j in (i, i + 1)]

    def dims(self, cutoff):
        """Gets the subsystem dimensions: qubits first, then ensembles.

        :param cutoff: Fock dimension of every ensemble mode
        :type cutoff: int
        :rtype: list
        """
        return [2] * self.n_qubits + [cutoff] * self.n_ensembles

    def scaled(self, factor):
        """Returns a copy with every coupling multiplied by factor.

        :type factor: float
        :rtype: ChainSpec
        """
        couplings = [
            [factor * value for value in row] for row in self.couplings
        ]
        return replace(self, couplings=couplings)

    def without_mutual(self):
        """Returns a copy with M12 = 0.

        :rtype: ChainSpec
        """
        return replace(self, mutual_inductance_coupling=0.0)

    def to_dict(self):
        """Dumps self to dictionary.

        :rtype: dict
        """
        return obj_to_dict(self)
