"""Dispersive elimination of the qubits.

The generator V solves H_I + [H_0, V] = 0, and the second-order effective
Hamiltonian acts on the ensemble modes with every qubit in its ground state.
"""
import json
import logging
import warnings
from dataclasses import dataclass, field

import numpy as np

from hybridlattice.errors import (
    DetuningWarning,
    DimensionError,
    RangeError,
    ResonanceError,
)
from hybridlattice.hilbert import (
    DEFAULT_CUTOFF,
    boson_annihilator,
    build_free_hamiltonian,
    build_full_hamiltonian,
    build_interaction_hamiltonian,
    eigensolve,
    embed,
    identity,
    occupation_mask,
    qubit_ground_mask,
    qubit_operator,
)
from hybridlattice.utils import _NumpyJSONEncoder, parallel_map

logger = logging.getLogger(__name__)

DETUNING_FACTOR = 3.0
VALIDATION_LEVELS = 4
RESIDUAL_TOL = 1e-10
DEVIATION_TOL = 2e-3
SCALING_MIN = 6.0
CUTOFF_TOL = 1e-6
GROUND_OVERLAP = 0.5


@dataclass(frozen=True)
class DispersiveCoeffs(object):
    """Generator coefficients for every adjoining (qubit, ensemble) pair.

    A lists J/Delta for all pairs, then J/Lambda in the same pair order; for
    two qubits that is A_1..A_4 followed by A_5..A_8.
    """

    A: tuple
    detunings: tuple
    sums: tuple
    pairs: tuple
    n_qubits: int
    n_ensembles: int
    warnings: tuple = ()

    @property
    def rotating(self):
        """Gets the J/Delta half of A."""
        return self.A[: len(self.pairs)]

    @property
    def counter_rotating(self):
        """Gets the J/Lambda half of A."""
        return self.A[len(self.pairs):]

    def to_dict(self):
        """Dumps self to dictionary.

        :rtype: dict
        """
        return {
            'A': list(self.A),
            'pairs': [[i + 1, j + 1] for i, j in self.pairs],
            'detunings_GHz': list(self.detunings),
            'sums_GHz': list(self.sums),
            'warnings': list(self.warnings),
        }


@dataclass(frozen=True)
class EffectiveParams(object):
    """Dressed frequencies and bilinear couplings of the ensemble modes."""

    nu_prime: tuple
    g_self: tuple
    g_hop: tuple

    def __post_init__(self):
        for name in ('nu_prime', 'g_self', 'g_hop'):
            object.__setattr__(
                self, name, tuple(float(v) for v in getattr(self, name))
            )
        if len(self.g_self) != len(self.nu_prime) or (
            len(self.g_hop) != len(self.nu_prime) - 1
        ):
            raise DimensionError(
                f'{len(self.nu_prime)} modes need as many g_self values and '
                f'one g_hop value fewer'
            )

    @property
    def n_modes(self):
        """Gets the number of ensemble modes."""
        return len(self.nu_prime)

    def to_dict(self):
        """Dumps self to dictionary.

        :rtype: dict
        """
        return {
            'nu_prime_GHz': list(self.nu_prime),
            'g_self_GHz': list(self.g_self),
            'g_hop_GHz': list(self.g_hop),
        }


@dataclass(frozen=True)
class DispersiveReport(object):
    """Outcome of comparing the effective and exact spectra."""

    residual: float
    deviation: float
    deviation_half_J: float
    scaling_ratio: float
    cutoff: int
    cutoff_shift: float
    levels: int
    warnings: tuple = ()
    mutual_shift: float = None
    checks: dict = field(default_factory=dict)

    @property
    def failed(self):
        """Lists the names of checks outside their tolerance."""
        return [
            name for name, check in self.checks.items() if not check['passed']
        ]

    @property
    def passed(self):
        """Checks whether every check passed."""
        return not self.failed

    def to_dict(self):
        """Dumps self to dictionary.

        :rtype: dict
        """
        data = {
            'residual': self.residual,
            'deviation_GHz': self.deviation,
            'deviation_half_J_GHz': self.deviation_half_J,
            'scaling_ratio': self.scaling_ratio,
            'cutoff': self.cutoff,
            'cutoff_shift_GHz': self.cutoff_shift,
            'levels': self.levels,
            'warnings': list(self.warnings),
            'checks': {name: dict(c) for name, c in self.checks.items()},
            'passed': self.passed,
        }
        if self.mutual_shift is not None:
            data['mutual_shift_GHz'] = self.mutual_shift
        return data

    def to_json(self, *args, **kwargs):
        """Dumps self to JSON.

        :param args: Positional arguments for json.dumps
        :param kwargs: Keyword arguments for json.dumps
        :return: JSON string
        :rtype: str
        """
        kwargs['cls'] = _NumpyJSONEncoder
        return json.dumps(self.to_dict(), *args, **kwargs)


def dispersive_coefficients(chain, detuning_factor=DETUNING_FACTOR):
    """Computes J_ij / Delta_ij and J_ij / Lambda_ij for adjoining pairs.

    :param chain: Device description
    :type chain: ChainSpec
    :param detuning_factor: Warn when Delta_ij < factor * J_ij
    :type detuning_factor: float
    :raises ResonanceError:
    :rtype: DispersiveCoeffs
    """
    nu_q = chain.nu_q
    nu_s = chain.nu_s
    pairs = chain.adjoining_pairs()
    detunings, sums, rotating, counter, notes = [], [], [], [], []
    for i, j in pairs:
        coupling = chain.couplings[i][j]
        detuning = nu_q[i] - nu_s[j]
        total = nu_q[i] + nu_s[j]
        if coupling and detuning <= 0:
            raise ResonanceError((i + 1, j + 1), detuning)
        if coupling and detuning < detuning_factor * coupling:
            message = (
                f'Qubit {i + 1} / ensemble {j + 1}: detuning {detuning:.6g} '
                f'GHz is below {detuning_factor:g} x J = '
                f'{detuning_factor * coupling:.6g} GHz'
            )
            warnings.warn(message, DetuningWarning)
            notes.append(message)
        detunings.append(detuning)
        sums.append(total)
        rotating.append(coupling / detuning if coupling else 0.0)
        counter.append(coupling / total if coupling else 0.0)
    return DispersiveCoeffs(
        A=tuple(rotating + counter),
        detunings=tuple(detunings),
        sums=tuple(sums),
        pairs=tuple(pairs),
        n_qubits=chain.n_qubits,
        n_ensembles=chain.n_ensembles,
        warnings=tuple(notes),
    )


def build_generator(coeffs, cutoff=DEFAULT_CUTOFF):
    """Assembles the anti-Hermitian generator.

    V = sum_ij A_ij (sigma_-^(i) s_j^+ - sigma_+^(i) s_j)
        + A'_ij (sigma_-^(i) s_j - sigma_+^(i) s_j^+)

    :param coeffs: Generator coefficients
    :type coeffs: DispersiveCoeffs
    :param cutoff: Fock dimension per ensemble
    :type cutoff: int
    :raises DimensionError:
    :rtype: OperatorMatrix
    """
    q = coeffs.n_qubits
    dims = [2] * q + [cutoff] * coeffs.n_ensembles
    a = boson_annihilator(cutoff)
    v = identity(dims) * 0
    for (i, j), rot, cr in zip(
        coeffs.pairs, coeffs.rotating, coeffs.counter_rotating
    ):
        if not (rot or cr):
            continue
        lower = embed(qubit_operator('-'), i, dims)
        s = embed(a, q + j, dims)
        term = lower @ (rot * s.dag() + cr * s)
        v = v + term - term.dag()
    return v


def generator_residual(chain, cutoff=DEFAULT_CUTOFF):
    """Gets ||H_I + [H_0, V]|| / ||H_I|| on the truncation-safe subspace.

    Basis states with any mode at occupation >= cutoff - 1 are projected
    out. M12 is ignored.

    :param chain: Device description
    :type chain: ChainSpec
    :param cutoff: Fock dimension per ensemble (>= 3)
    :type cutoff: int
    :raises ResonanceError:
    :rtype: float
    """
    chain = chain.without_mutual()
    h0 = build_free_hamiltonian(chain, cutoff)
    hi = build_interaction_hamiltonian(chain, cutoff)
    v = build_generator(dispersive_coefficients(chain), cutoff)
    mask = occupation_mask(h0.dims, chain.n_qubits, cutoff - 1)
    residual = (hi + h0.commutator(v)).restrict(mask)
    scale = np.linalg.norm(hi.restrict(mask))
    if scale == 0:
        return 0.0
    return float(np.linalg.norm(residual) / scale)


def effective_params(chain, detuning_factor=DETUNING_FACTOR):
    """Evaluates the dressed frequencies and couplings.

    With w_ij = 1/Delta_ij + 1/Lambda_ij:
    g_jj = sum_i J_ij^2 w_ij / 2, nu'_j = nu_sj - 2 g_jj and
    g_j,j+1 = sum_i J_ij J_i,j+1 (w_ij + w_i,j+1) / 2.

    :param chain: Device description
    :type chain: ChainSpec
    :param detuning_factor: Warn when Delta_ij < factor * J_ij
    :type detuning_factor: float
    :raises ResonanceError:
    :rtype: EffectiveParams
    """
    coeffs = dispersive_coefficients(chain, detuning_factor)
    weight = {}
    for pair, detuning, total in zip(
        coeffs.pairs, coeffs.detunings, coeffs.sums
    ):
        i, j = pair
        if chain.couplings[i][j]:
            weight[pair] = 1 / detuning + 1 / total
    n = chain.n_ensembles
    g_self = [0.0] * n
    g_hop = [0.0] * (n - 1)
    for (i, j), w in weight.items():
        g_self[j] += chain.couplings[i][j] ** 2 * w / 2
    for i in range(chain.n_qubits):
        left, right = (i, i), (i, i + 1)
        if left in weight and right in weight:
            g_hop[i] += (
                chain.couplings[i][i]
                * chain.couplings[i][i + 1]
                * (weight[left] + weight[right])
                / 2
            )
    nu_prime = [nu - 2 * g for nu, g in zip(chain.nu_s, g_self)]
    return EffectiveParams(nu_prime=nu_prime, g_self=g_self, g_hop=g_hop)


def _mode_operators(n_modes, cutoff):
    dims = [cutoff] * n_modes
    a = boson_annihilator(cutoff)
    return dims, [embed(a, slot, dims) for slot in range(n_modes)]


def build_effective_hamiltonian(params, cutoff=DEFAULT_CUTOFF):
    """Builds the bilinear effective Hamiltonian on the ensemble modes.

    H = sum_j nu'_j s_j^+ s_j - sum_j g_jj (s_j^+ s_j^+ + s_j s_j)
        - sum_j g_j,j+1 (s_j s_j+1^+ + s_j+1 s_j^+ + s_j+1^+ s_j^+ + s_j s_j+1)

    :param params: Effective parameters
    :type params: EffectiveParams
    :param cutoff: Fock dimension per mode
    :type cutoff: int
    :raises DimensionError:
    :rtype: OperatorMatrix
    """
    dims, s = _mode_operators(params.n_modes, cutoff)
    h = identity(dims) * 0
    for nu, g, mode in zip(params.nu_prime, params.g_self, s):
        squeeze = mode @ mode
        h = h + nu * (mode.dag() @ mode) - g * (squeeze + squeeze.dag())
    for j, g in enumerate(params.g_hop):
        if g:
            hop = s[j].dag() @ s[j + 1]
            pair = s[j] @ s[j + 1]
            h = h - g * (hop + hop.dag() + pair + pair.dag())
    return h


def build_rwa_hamiltonian(params, cutoff=DEFAULT_CUTOFF):
    """Builds the excitation-conserving hopping form.

    H = sum_j nu'_j s_j^+ s_j - sum_j g_j,j+1 (s_j s_j+1^+ + s_j+1 s_j^+)

    :param params: Effective parameters
    :type params: EffectiveParams
    :param cutoff: Fock dimension per mode
    :type cutoff: int
    :raises DimensionError:
    :rtype: OperatorMatrix
    """
    dims, s = _mode_operators(params.n_modes, cutoff)
    h = identity(dims) * 0
    for nu, mode in zip(params.nu_prime, s):
        h = h + nu * (mode.dag() @ mode)
    for j, g in enumerate(params.g_hop):
        if g:
            hop = s[j].dag() @ s[j + 1]
            h = h - g * (hop + hop.dag())
    return h


def single_excitation_block(params):
    """Gets the one-excitation block of the hopping form.

    :param params: Effective parameters
    :type params: EffectiveParams
    :return: Tridiagonal matrix with nu'_j on the diagonal, -g_j,j+1 beside
    :rtype: numpy.ndarray
    """
    hop = -np.asarray(params.g_hop)
    return np.diag(params.nu_prime) + np.diag(hop, 1) + np.diag(hop, -1)


def _excitations(op, levels):
    values = eigensolve(op).eigenvalues
    return values[1: levels + 1] - values[0]


def rwa_deviation(params, cutoff=DEFAULT_CUTOFF, levels=3):
    """Gets the max difference between the lowest excitation energies of the
    bilinear and the hopping Hamiltonians.

    :param params: Effective parameters
    :type params: EffectiveParams
    :param cutoff: Fock dimension per mode
    :type cutoff: int
    :param levels: Number of excitation energies compared
    :type levels: int
    :rtype: float
    """
    full, rwa = parallel_map(
        lambda build: _excitations(build(params, cutoff), levels),
        (build_effective_hamiltonian, build_rwa_hamiltonian),
    )
    return float(np.max(np.abs(full - rwa)))


def ground_sector_spectrum(chain, cutoff=DEFAULT_CUTOFF):
    """Gets the eigenvalues of the full H whose eigenvectors lie mostly in
    the all-qubits-ground subspace.

    :param chain: Device description
    :type chain: ChainSpec
    :param cutoff: Fock dimension per ensemble
    :type cutoff: int
    :return: Ascending eigenvalues (GHz)
    :rtype: numpy.ndarray
    """
    h = build_full_hamiltonian(chain, cutoff)
    spectrum = eigensolve(h, vectors=True)
    mask = qubit_ground_mask(h.dims, chain.n_qubits)
    weight = np.sum(np.abs(spectrum.eigenvectors[mask, :]) ** 2, axis=0)
    return spectrum.eigenvalues[weight > GROUND_OVERLAP]


def spectral_deviation(
    chain, cutoff=DEFAULT_CUTOFF, levels=VALIDATION_LEVELS
):
    """Compares the low spectrum of the effective Hamiltonian with the exact
    qubit-ground sector.

    The lowest `levels` eigenvalues, ground state included, are compared
    through their excitation energies E_n - E_0. With the default 4 and
    three ensembles that is the single-excitation manifold; two-boson
    levels carry a fourth-order Kerr-like shift the bilinear model omits.

    :param chain: Device description (M12 is kept if nonzero)
    :type chain: ChainSpec
    :param cutoff: Fock dimension per ensemble
    :type cutoff: int
    :param levels: Number of lowest eigenvalues compared (>= 2)
    :type levels: int
    :return: max |E_exact - E_eff| (GHz)
    :rtype: float
    """
    exact = ground_sector_spectrum(chain, cutoff)
    exact = exact[1:levels] - exact[0]
    with warnings.catch_warnings():
        warnings.simplefilter('ignore', DetuningWarning)
        params = effective_params(chain)
    effective = _excitations(
        build_effective_hamiltonian(params, cutoff), levels - 1
    )
    return float(np.max(np.abs(exact - effective)))


def cutoff_shift(
    chain, cutoff=DEFAULT_CUTOFF, levels=VALIDATION_LEVELS
):
    """Gets max |E_n(d) - E_n(d + 2)| over the lowest levels of the full H.

    :rtype: float
    """
    low, high = parallel_map(
        lambda d: eigensolve(
            build_full_hamiltonian(chain, d)
        ).eigenvalues[:levels],
        (cutoff, cutoff + 2),
    )
    return float(np.max(np.abs(low - high)))


def _check(value, tolerance, passed):
    return {'value': value, 'tolerance': tolerance, 'passed': bool(passed)}


def validate_dispersive(
    chain,
    cutoff=DEFAULT_CUTOFF,
    levels=VALIDATION_LEVELS,
    detuning_factor=DETUNING_FACTOR,
    include_mutual=False,
):
    """Measures how well the effective Hamiltonian reproduces the exact one.

    The report holds the generator residual, the spectral deviation at J and
    J/2 with their ratio, the cutoff shift and, when include_mutual is set
    and M12 != 0, the ground-sector shift caused by M12.

    :param chain: Device description
    :type chain: ChainSpec
    :param cutoff: Fock dimension per ensemble
    :type cutoff: int
    :param levels: Number of lowest eigenvalues compared (>= 2)
    :type levels: int
    :param detuning_factor: Warn when Delta_ij < factor * J_ij
    :type detuning_factor: float
    :param include_mutual: Quantify the M12 shift
    :type include_mutual: bool
    :raises RangeError:
    :raises ResonanceError:
    :rtype: DispersiveReport
    """
    if levels < 2:
        raise RangeError(f'At least 2 levels are compared, got {levels}')
    bare = chain.without_mutual()
    coeffs = dispersive_coefficients(bare, detuning_factor)
    logger.info('Validating with cutoff %d on %d levels', cutoff, levels)
    residual = generator_residual(bare, cutoff)
    deviation, deviation_half = parallel_map(
        lambda spec: spectral_deviation(spec, cutoff, levels),
        (bare, bare.scaled(0.5)),
    )
    scaling = deviation / deviation_half if deviation_half > 0 else None
    shift = cutoff_shift(bare, cutoff, levels)
    mutual_shift = None
    if include_mutual and chain.mutual_inductance_coupling:
        with_mutual, without = parallel_map(
            lambda spec: ground_sector_spectrum(spec, cutoff)[:levels],
            (chain, bare),
        )
        mutual_shift = float(
            np.max(
                np.abs(
                    (with_mutual[1:] - with_mutual[0])
                    - (without[1:] - without[0])
                )
            )
        )
    negligible = deviation < 1e-12
    checks = {
        'generator_residual': _check(
            residual, RESIDUAL_TOL, residual < RESIDUAL_TOL
        ),
        'effective_deviation': _check(
            deviation, DEVIATION_TOL, deviation < DEVIATION_TOL
        ),
        'coupling_scaling': _check(
            scaling,
            SCALING_MIN,
            negligible or (scaling is not None and scaling >= SCALING_MIN),
        ),
        'cutoff_convergence': _check(shift, CUTOFF_TOL, shift < CUTOFF_TOL),
    }
    for name, check in checks.items():
        if not check['passed']:
            logger.warning(
                'Check %s failed: %s (tolerance %s)',
                name,
                check['value'],
                check['tolerance'],
            )
    return DispersiveReport(
        residual=residual,
        deviation=deviation,
        deviation_half_J=deviation_half,
        scaling_ratio=None if scaling is None else float(scaling),
        cutoff=cutoff,
        cutoff_shift=shift,
        levels=levels,
        warnings=coeffs.warnings,
        mutual_shift=mutual_shift,
        checks=checks,
    )
