"""Dense operator algebra for the hybrid chain.

Qubit basis: index 0 is the excited state, index 1 the ground state, so that
sigma_z = diag(1, -1) and sigma_- = |1><0|. Spins use the same convention
(index 1 is spin down). Subsystems are ordered qubits first, then ensembles,
each in index order.
"""
import logging
import math
from dataclasses import dataclass, field
from functools import reduce

import numpy as np
from scipy import linalg

from hybridlattice.errors import DimensionError, HermiticityError

logger = logging.getLogger(__name__)

HERMITICITY_RTOL = 1e-12
MAX_SPINS = 12
DEFAULT_CUTOFF = 5

_PAULI = {
    'i': np.eye(2),
    'x': np.array([[0, 1], [1, 0]]),
    'y': np.array([[0, -1j], [1j, 0]]),
    'z': np.array([[1, 0], [0, -1]]),
    '+': np.array([[0, 1], [0, 0]]),
    '-': np.array([[0, 0], [1, 0]]),
}


@dataclass(frozen=True, eq=False)
class OperatorMatrix(object):
    """Dense complex square matrix on a tensor-product space."""

    dims: tuple
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        data = np.array(self.data, dtype=complex)
        size = int(np.prod(dims)) if dims else 1
        if data.shape != (size, size):
            raise DimensionError(
                f'Matrix of shape {data.shape} does not match dims {dims}'
            )
        data.setflags(write=False)
        object.__setattr__(self, 'dims', dims)
        object.__setattr__(self, 'data', data)

    def __repr__(self):
        return f'{self.__class__.__name__}(dims={self.dims})'

    @property
    def dim(self):
        """Gets the Hilbert-space dimension."""
        return self.data.shape[0]

    def _wrap(self, data):
        return OperatorMatrix(self.dims, data)

    def _check(self, other):
        if self.dims != other.dims:
            raise DimensionError(
                f'Operators on dims {self.dims} and {other.dims} do not mix'
            )

    def __add__(self, other):
        self._check(other)
        return self._wrap(self.data + other.data)

    def __sub__(self, other):
        self._check(other)
        return self._wrap(self.data - other.data)

    def __neg__(self):
        return self._wrap(-self.data)

    def __mul__(self, scalar):
        return self._wrap(self.data * scalar)

    __rmul__ = __mul__

    def __matmul__(self, other):
        self._check(other)
        return self._wrap(self.data @ other.data)

    def dag(self):
        """Gets the Hermitian conjugate.

        :rtype: OperatorMatrix
        """
        return self._wrap(self.data.conj().T)

    def commutator(self, other):
        """Gets [self, other].

        :rtype: OperatorMatrix
        """
        return self @ other - other @ self

    def norm(self):
        """Gets the Frobenius norm.

        :rtype: float
        """
        return float(np.linalg.norm(self.data))

    def max_abs(self):
        """Gets max|entry|.

        :rtype: float
        """
        return float(np.max(np.abs(self.data))) if self.data.size else 0.0

    def hermiticity_deviation(self):
        """Gets max|H - H^dagger|.

        :rtype: float
        """
        return float(np.max(np.abs(self.data - self.data.conj().T)))

    def is_hermitian(self, rtol=HERMITICITY_RTOL):
        """Checks max|H - H^dagger| < rtol * max|H|.

        :rtype: bool
        """
        return self.hermiticity_deviation() <= rtol * self.max_abs()

    def anti_hermiticity_deviation(self):
        """Gets max|V + V^dagger|.

        :rtype: float
        """
        return float(np.max(np.abs(self.data + self.data.conj().T)))

    def restrict(self, mask):
        """Gets the block on the basis states selected by a boolean mask.

        :param mask: Boolean vector of length dim
        :type mask: numpy.ndarray
        :return: Plain matrix of the block
        :rtype: numpy.ndarray
        """
        mask = np.asarray(mask, dtype=bool)
        return self.data[np.ix_(mask, mask)]


@dataclass(frozen=True, eq=False)
class SpectrumResult(object):
    """Ascending spectrum of a Hermitian operator."""

    eigenvalues: np.ndarray
    ground_energy: float
    eigenvectors: np.ndarray = field(default=None, repr=False)


def qubit_operator(name):
    """Gets a single-qubit operator: 'i', 'x', 'y', 'z', '+' or '-'.

    :type name: str
    :rtype: OperatorMatrix
    """
    try:
        return OperatorMatrix((2,), _PAULI[name])
    except KeyError:
        raise DimensionError(f'Unknown qubit operator: {name!r}')


def boson_annihilator(cutoff):
    """Gets the truncated annihilator with a[m, m + 1] = sqrt(m + 1).

    :param cutoff: Fock dimension d (>= 2)
    :type cutoff: int
    :raises DimensionError:
    :rtype: OperatorMatrix
    """
    if int(cutoff) != cutoff or cutoff < 2:
        raise DimensionError(f'Fock cutoff must be an integer >= 2: {cutoff}')
    cutoff = int(cutoff)
    data = np.diag(np.sqrt(np.arange(1, cutoff)), k=1)
    return OperatorMatrix((cutoff,), data)


def identity(dims):
    """Gets the identity on the product space.

    :type dims: list
    :rtype: OperatorMatrix
    """
    dims = tuple(dims)
    return OperatorMatrix(dims, np.eye(int(np.prod(dims))))


def embed(op, slot, dims):
    """Places op in one slot of the product space, identities elsewhere.

    :param op: Single-subsystem operator
    :type op: OperatorMatrix
    :param slot: Subsystem index
    :type slot: int
    :param dims: Subsystem dimensions
    :type dims: list
    :raises DimensionError:
    :rtype: OperatorMatrix
    """
    dims = tuple(dims)
    if not 0 <= slot < len(dims):
        raise DimensionError(f'Slot {slot} out of range for dims {dims}')
    if op.dim != dims[slot]:
        raise DimensionError(
            f'Operator of dimension {op.dim} does not fit slot {slot} '
            f'of dims {dims}'
        )
    factors = [
        op.data if index == slot else np.eye(dim)
        for index, dim in enumerate(dims)
    ]
    return OperatorMatrix(dims, reduce(np.kron, factors))


def _chain_operators(chain, cutoff):
    """Embeds sigma_z, sigma_x, sigma_+- and s_j for every subsystem."""
    dims = chain.dims(cutoff)
    a = boson_annihilator(cutoff)
    q = chain.n_qubits
    ops = {
        'dims': dims,
        'sz': [embed(qubit_operator('z'), i, dims) for i in range(q)],
        'sx': [embed(qubit_operator('x'), i, dims) for i in range(q)],
        'sp': [embed(qubit_operator('+'), i, dims) for i in range(q)],
        'sm': [embed(qubit_operator('-'), i, dims) for i in range(q)],
        's': [embed(a, q + j, dims) for j in range(chain.n_ensembles)],
    }
    return ops


def build_free_hamiltonian(chain, cutoff=DEFAULT_CUTOFF, ops=None):
    """Builds H_0 = sum_i nu_qi sigma_z^(i) / 2 + sum_j nu_sj s_j^+ s_j.

    :param chain: Device description
    :type chain: ChainSpec
    :param cutoff: Fock dimension per ensemble
    :type cutoff: int
    :rtype: OperatorMatrix
    """
    ops = ops or _chain_operators(chain, cutoff)
    h = identity(ops['dims']) * 0
    for nu_q, sz in zip(chain.nu_q, ops['sz']):
        h = h + 0.5 * nu_q * sz
    for nu_s, s in zip(chain.nu_s, ops['s']):
        h = h + nu_s * (s.dag() @ s)
    return h


def build_interaction_hamiltonian(chain, cutoff=DEFAULT_CUTOFF, ops=None):
    """Builds H_I = sum_ij J_ij sigma_x^(i) (s_j + s_j^+).

    :param chain: Device description
    :type chain: ChainSpec
    :param cutoff: Fock dimension per ensemble
    :type cutoff: int
    :rtype: OperatorMatrix
    """
    ops = ops or _chain_operators(chain, cutoff)
    h = identity(ops['dims']) * 0
    for i, j in chain.adjoining_pairs():
        coupling = chain.couplings[i][j]
        if coupling:
            s = ops['s'][j]
            h = h + coupling * (ops['sx'][i] @ (s + s.dag()))
    return h


def build_full_hamiltonian(chain, cutoff=DEFAULT_CUTOFF):
    """Builds H = H_FQ + H_SE + H_SE-FQ on qubits x truncated modes.

    Neighbouring qubits interact through M12 sigma_x sigma_x.

    :param chain: Device description
    :type chain: ChainSpec
    :param cutoff: Fock dimension per ensemble (>= 2)
    :type cutoff: int
    :raises DimensionError:
    :raises NonPositiveSplitting:
    :rtype: OperatorMatrix
    """
    ops = _chain_operators(chain, cutoff)
    logger.debug(
        'Building full Hamiltonian on dims %s (dimension %d)',
        ops['dims'],
        int(np.prod(ops['dims'])),
    )
    h = build_free_hamiltonian(chain, cutoff, ops) + (
        build_interaction_hamiltonian(chain, cutoff, ops)
    )
    mutual = chain.mutual_inductance_coupling
    if mutual:
        for left, right in zip(ops['sx'], ops['sx'][1:]):
            h = h + mutual * (left @ right)
    return h


def qubit_ground_mask(dims, n_qubits):
    """Marks basis states in which every qubit is in its ground state.

    :param dims: Subsystem dimensions, qubits first
    :type dims: list
    :param n_qubits: Number of leading qubit slots
    :type n_qubits: int
    :return: Boolean vector over the product basis
    :rtype: numpy.ndarray
    """
    indices = np.indices(dims).reshape(len(dims), -1)
    return np.all(indices[:n_qubits] == 1, axis=0)


def occupation_mask(dims, first_mode, below):
    """Marks basis states where every mode slot has occupation < below.

    :param dims: Subsystem dimensions
    :type dims: list
    :param first_mode: Index of the first bosonic slot
    :type first_mode: int
    :param below: Occupation bound
    :type below: int
    :rtype: numpy.ndarray
    """
    indices = np.indices(dims).reshape(len(dims), -1)
    return np.all(indices[first_mode:] < below, axis=0)


def total_number_operator(n_modes, cutoff):
    """Gets N = sum_i s_i^+ s_i on n_modes truncated modes.

    :rtype: OperatorMatrix
    """
    dims = [cutoff] * n_modes
    a = boson_annihilator(cutoff)
    number = a.dag() @ a
    return reduce(
        lambda acc, slot: acc + embed(number, slot, dims),
        range(n_modes),
        identity(dims) * 0,
    )


def collective_spin_operator(n, weights):
    """Builds s^+ = (1/J) sum_m J^(m) tau_+^(m) on the 2^n spin space.

    |J| = sqrt(sum_m |J^(m)|^2), so <vac|[s, s^+]|vac> = 1 for any weights.
    J carries the sign of the first non-zero weight, which fixes the overall
    phase of the collective mode: n = 1 gives tau_+ for any weight.

    :param n: Number of spins (1 to 12)
    :type n: int
    :param weights: Single-spin couplings J^(m), not all zero
    :type weights: list
    :raises DimensionError:
    :rtype: OperatorMatrix
    """
    if int(n) != n or not 1 <= n <= MAX_SPINS:
        raise DimensionError(
            f'Exact spin space supports 1 to {MAX_SPINS} spins, got {n}'
        )
    n = int(n)
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (n,):
        raise DimensionError(f'Expected {n} weights, got {weights.shape}')
    norm = math.sqrt(float(np.sum(np.abs(weights) ** 2)))
    if norm == 0:
        raise DimensionError('At least one weight must be non-zero')
    norm = math.copysign(norm, weights[np.flatnonzero(weights)[0]])
    dims = [2] * n
    raising = qubit_operator('+')
    s_dag = identity(dims) * 0
    for slot, weight in enumerate(weights):
        if weight:
            s_dag = s_dag + (weight / norm) * embed(raising, slot, dims)
    return s_dag


def spin_vacuum(n):
    """Gets the all-spins-down state on the 2^n space.

    :rtype: numpy.ndarray
    """
    state = np.zeros(2 ** n, dtype=complex)
    state[-1] = 1
    return state


def symmetric_excitation_state(n, k):
    """Gets the normalised symmetric state with k spins up.

    :param n: Number of spins
    :type n: int
    :param k: Number of excitations (0 <= k <= n)
    :type k: int
    :raises DimensionError:
    :rtype: numpy.ndarray
    """
    if not 0 <= k <= n:
        raise DimensionError(f'Excitation number {k} outside 0..{n}')
    s_dag = collective_spin_operator(n, np.ones(n))
    state = spin_vacuum(n)
    for _ in range(k):
        state = s_dag.data @ state
    return state / np.linalg.norm(state)


def eigensolve(op, vectors=False):
    """Diagonalises a Hermitian operator densely.

    :param op: Hermitian operator
    :type op: OperatorMatrix
    :param vectors: Also return eigenvectors (columns), defaults to False
    :type vectors: bool
    :raises HermiticityError:
    :rtype: SpectrumResult
    """
    deviation = op.hermiticity_deviation()
    if deviation > HERMITICITY_RTOL * op.max_abs():
        raise HermiticityError(deviation)
    logger.debug('Diagonalising a %dx%d matrix', op.dim, op.dim)
    if vectors:
        values, vecs = linalg.eigh(op.data)
    else:
        values, vecs = linalg.eigh(op.data, eigvals_only=True), None
    return SpectrumResult(
        eigenvalues=values, ground_energy=float(values[0]), eigenvectors=vecs
    )
