"""Periodic array of spin ensembles coupled through dispersive qubits.

With uniform nu_s and g, the momentum-space blocks are
A_k = nu_s - 2g(1 + cos k) and B_k = -2g(1 + cos k), and the Bogoliubov
quasi-particle energy is E_k = sqrt(A_k^2 - B_k^2).
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from hybridlattice.core_types import PhysicalConstants
from hybridlattice.errors import (
    ConfigError,
    DimensionError,
    DivergentCoefficients,
    NonPositiveSplitting,
    NoStableField,
    RangeError,
    ResonanceError,
    UnstableMode,
)
from hybridlattice.utils import is_finite, obj_to_dict

logger = logging.getLogger(__name__)

DEFAULT_SITES = 64
DEFAULT_POINTS = 64
MAX_FINITE_SITES = 512
IMAGINARY_TOL = 1e-6


@dataclass(frozen=True)
class LatticeParams(object):
    """Uniform periodic array: frequency nu_s, coupling g, N sites."""

    nu_s: float
    g: float
    N: int = DEFAULT_SITES

    def __post_init__(self):
        if not is_finite(self.nu_s) or self.nu_s <= 0:
            raise ConfigError('nu_s', f'must be positive, got {self.nu_s!r}')
        if not is_finite(self.g) or self.g < 0:
            raise ConfigError('g', f'must be non-negative, got {self.g!r}')
        if int(self.N) != self.N or self.N < 2:
            raise ConfigError('N', f'must be an integer >= 2, got {self.N!r}')
        object.__setattr__(self, 'nu_s', float(self.nu_s))
        object.__setattr__(self, 'g', float(self.g))
        object.__setattr__(self, 'N', int(self.N))

    def to_dict(self):
        """Dumps self to dictionary.

        :rtype: dict
        """
        return obj_to_dict(self)


@dataclass(frozen=True)
class DispersionResult(object):
    """Half-zone scan of the quasi-particle band.

    For an unstable array E_k, mu_k, nu_k, gap and the ground energy are None;
    partial_E_k then holds (k, E_k) for the modes that remain real. At the
    gapless boundary mu_k and nu_k are None at k = 0.
    """

    params: LatticeParams
    k_values: tuple
    E_tb: tuple
    stable: bool
    margin: float
    gapless: bool = False
    E_k: tuple = None
    mu_k: tuple = None
    nu_k: tuple = None
    gap: float = None
    ground_energy: float = None
    ground_energy_density: float = None
    unstable_k_range: tuple = None
    partial_E_k: tuple = ()

    def full_zone(self):
        """Mirrors the band to negative k for plotting over [-pi, pi).

        :raises UnstableMode:
        :return: (k values, E_k) with k ascending
        :rtype: tuple
        """
        if not self.stable:
            raise UnstableMode(
                'An unstable band has no full-zone dispersion',
                k_range=self.unstable_k_range,
            )
        k = np.asarray(self.k_values)
        energies = np.asarray(self.E_k)
        positive = k > 0
        k_full = np.concatenate([-k[positive][::-1], k])
        e_full = np.concatenate([energies[positive][::-1], energies])
        return tuple(k_full.tolist()), tuple(e_full.tolist())

    def to_dict(self):
        """Dumps self to dictionary.

        :rtype: dict
        """
        return obj_to_dict(self)


def lattice_g(J, nu_q, nu_s):
    """Gets the uniform effective coupling g = J^2 (1/Delta + 1/Lambda).

    :param J: Qubit-ensemble coupling (GHz)
    :type J: float
    :param nu_q: Qubit frequency (GHz)
    :type nu_q: float
    :param nu_s: Ensemble frequency (GHz)
    :type nu_s: float
    :raises ResonanceError:
    :raises NonPositiveSplitting:
    :rtype: float
    """
    if nu_s <= 0:
        raise NonPositiveSplitting(f'nu_s must be positive, got {nu_s}')
    detuning = nu_q - nu_s
    if detuning <= 0:
        raise ResonanceError((1, 1), detuning)
    return J ** 2 * (1 / detuning + 1 / (nu_q + nu_s))


def _band_factor(k):
    return 1 + np.cos(np.asarray(k, dtype=float))


def _radicand(p, k):
    # nu_s (nu_s - 4g(1 + cos k)) vanishes exactly at nu_s = 8g, k = 0
    return p.nu_s * (p.nu_s - 4 * p.g * _band_factor(k))


def _scalar_or_array(values):
    if np.ndim(values) == 0:
        return float(values)
    return values


def dispersion_full(p, k):
    """Evaluates E_k = sqrt(nu_s^2 - 4 nu_s g (1 + cos k)).

    :param p: Lattice parameters
    :type p: LatticeParams
    :param k: Wave vector(s) in radians
    :type k: float or numpy.ndarray
    :raises UnstableMode:
    :return: Quasi-particle energy (GHz)
    :rtype: float or numpy.ndarray
    """
    radicand = _radicand(p, k)
    unstable = radicand < 0
    if np.any(unstable):
        bad_k = np.atleast_1d(np.asarray(k, dtype=float))
        bad_k = np.broadcast_to(bad_k, np.atleast_1d(radicand).shape)
        bad_k = bad_k[np.atleast_1d(unstable)]
        raise UnstableMode(
            f'E_k is imaginary at k = {bad_k[0]:.6g} '
            f'(nu_s = {p.nu_s:.6g} GHz < 8g = {8 * p.g:.6g} GHz)',
            k=float(bad_k[0]),
            k_range=(float(bad_k.min()), float(bad_k.max())),
        )
    return _scalar_or_array(np.sqrt(radicand))


def dispersion_tb(p, k):
    """Evaluates the tight-binding band nu_s - 2g(1 + cos k).

    :param p: Lattice parameters
    :type p: LatticeParams
    :param k: Wave vector(s) in radians
    :type k: float or numpy.ndarray
    :rtype: float or numpy.ndarray
    """
    return _scalar_or_array(p.nu_s - 2 * p.g * _band_factor(k))


def stability_check(p):
    """Checks nu_s >= 8g.

    :param p: Lattice parameters
    :type p: LatticeParams
    :return: (stable, margin nu_s - 8g in GHz)
    :rtype: tuple
    """
    margin = p.nu_s - 8 * p.g
    return margin >= 0, margin


def ground_state_energy(p):
    """Gets the zero-point energy of the N-site ring.

    E_g = 1/2 sum_m [E_k - A_k] over k = 2 pi m / N, m = 0..N-1, which counts
    every (k, -k) pair once and the self-paired momenta with weight 1/2.

    :param p: Lattice parameters (N sites)
    :type p: LatticeParams
    :raises UnstableMode:
    :return: E_g (GHz), never positive
    :rtype: float
    """
    k = 2 * np.pi * np.arange(p.N) / p.N
    energies = dispersion_full(p, k)
    return float(0.5 * np.sum(energies - dispersion_tb(p, k)))


def bogoliubov_coefficients(p, k):
    """Gets the real Bogoliubov coefficients (mu_k, nu_k).

    With the pair (s_k, s_-k^+) = T (alpha_k, alpha_-k^+) and
    T = [[mu, -nu], [-nu, mu]], T^T [[A, B], [B, A]] T = diag(E, E).
    sign(nu_k) = sign(B_k).

    :param p: Lattice parameters
    :type p: LatticeParams
    :param k: Wave vector (radians)
    :type k: float
    :raises UnstableMode:
    :raises DivergentCoefficients:
    :rtype: tuple
    """
    energy = dispersion_full(p, k)
    if energy == 0:
        raise DivergentCoefficients(
            f'E_k = 0 at k = {k:.6g}; coefficients diverge on the gapless '
            f'boundary'
        )
    a_k = dispersion_tb(p, k)
    b_k = -2 * p.g * float(_band_factor(k))
    ratio = a_k / energy
    mu = math.sqrt((ratio + 1) / 2)
    nu = math.copysign(math.sqrt(max(0.0, ratio - 1) / 2), b_k)
    if b_k == 0:
        nu = 0.0
    return mu, nu


def chain_blocks(p):
    """Builds the real-space blocks A (s^+ s) and B (s^+ s^+) of the ring.

    H = sum_ij A_ij s_i^+ s_j + 1/2 sum_ij B_ij (s_i^+ s_j^+ + s_i s_j).

    :rtype: tuple
    """
    n = p.N
    a = np.eye(n) * (p.nu_s - 2 * p.g)
    b = np.eye(n) * (-2 * p.g)
    for j in range(n):
        right = (j + 1) % n
        a[j, right] -= p.g
        a[right, j] -= p.g
        b[j, right] -= p.g
        b[right, j] -= p.g
    return a, b


def finite_chain_spectrum(p):
    """Gets the N positive symplectic eigenvalues of the real-space ring.

    Stability follows stability_check, so any negative margin raises. Uses
    Colpa's Cholesky method on M = [[A, B], [B, A]]; when M is only
    semidefinite (the margin-zero boundary) the dynamical matrix
    [[A, B], [-B, -A]] is diagonalised instead and imaginary parts above
    round-off are an error.

    :param p: Lattice parameters (N <= 512)
    :type p: LatticeParams
    :raises DimensionError:
    :raises UnstableMode:
    :return: Ascending excitation energies (GHz)
    :rtype: numpy.ndarray
    """
    n = p.N
    if n > MAX_FINITE_SITES:
        raise DimensionError(
            f'Finite chains are limited to {MAX_FINITE_SITES} sites, got {n}'
        )
    stable, margin = stability_check(p)
    if not stable:
        raise UnstableMode(
            f'The ring is unstable: nu_s - 8g = {margin:.3g} GHz', k=0.0
        )
    a, b = chain_blocks(p)
    hamiltonian = np.block([[a, b], [b, a]])
    logger.debug('Symplectic diagonalisation of a %d-site ring', n)
    try:
        upper = linalg.cholesky(hamiltonian)
    except linalg.LinAlgError:
        dynamical = np.block([[a, b], [-b, -a]])
        values = linalg.eigvals(dynamical)
        scale = max(1.0, float(np.max(np.abs(dynamical))))
        imaginary = np.abs(values.imag)
        if np.max(imaginary) > IMAGINARY_TOL * scale:
            raise UnstableMode(
                f'Symplectic eigenvalue with imaginary part '
                f'{np.max(imaginary):.3g} GHz: the ring is unstable'
            )
        return np.clip(np.sort(values.real)[n:], 0, None)
    metric = np.diag(np.concatenate([np.ones(n), -np.ones(n)]))
    values = linalg.eigh(upper @ metric @ upper.conj().T, eigvals_only=True)
    return np.sort(values)[n:]


def finite_chain_ground_energy(p):
    """Gets 1/2 (sum of symplectic eigenvalues - tr A).

    :param p: Lattice parameters
    :type p: LatticeParams
    :raises UnstableMode:
    :rtype: float
    """
    a, _ = chain_blocks(p)
    return float(0.5 * (np.sum(finite_chain_spectrum(p)) - np.trace(a)))


def brillouin_scan(p, n_points=DEFAULT_POINTS, allow_unstable=False):
    """Scans the band on the half-zone grid k = pi i / n_points.

    :param p: Lattice parameters
    :type p: LatticeParams
    :param n_points: Number of grid points (>= 2)
    :type n_points: int
    :param allow_unstable: Return an unstable result instead of raising
    :type allow_unstable: bool
    :raises RangeError:
    :raises UnstableMode:
    :rtype: DispersionResult
    """
    if n_points < 2:
        raise RangeError(f'A scan needs at least 2 points, got {n_points}')
    k = np.pi * np.arange(n_points) / n_points
    radicand = _radicand(p, k)
    stable, margin = stability_check(p)
    tb = dispersion_tb(p, k)
    logger.debug('Scanning %d k-points, margin %.6g GHz', n_points, margin)
    unstable = radicand < 0
    if np.any(unstable):
        k_range = (float(k[unstable].min()), float(k[unstable].max()))
        if not allow_unstable:
            raise UnstableMode(
                f'Unstable modes for k in [{k_range[0]:.6g}, '
                f'{k_range[1]:.6g}] (margin {margin:.6g} GHz)',
                k=k_range[0],
                k_range=k_range,
            )
        logger.warning('Array is unstable for k in %s', k_range)
        return DispersionResult(
            params=p,
            k_values=tuple(k.tolist()),
            E_tb=tuple(tb.tolist()),
            stable=False,
            margin=margin,
            unstable_k_range=k_range,
            partial_E_k=tuple(
                (float(kk), float(math.sqrt(r)))
                for kk, r in zip(k, radicand)
                if r >= 0
            ),
        )
    energies = np.sqrt(radicand)
    mu_k, nu_k = [], []
    for kk, energy in zip(k, energies):
        if energy == 0:
            mu_k.append(None)
            nu_k.append(None)
        else:
            mu, nu = bogoliubov_coefficients(p, float(kk))
            mu_k.append(mu)
            nu_k.append(nu)
    ground_energy = ground_state_energy(p)
    return DispersionResult(
        params=p,
        k_values=tuple(k.tolist()),
        E_tb=tuple(tb.tolist()),
        stable=True,
        margin=margin,
        gapless=bool(energies.min() == 0),
        E_k=tuple(energies.tolist()),
        mu_k=tuple(mu_k),
        nu_k=tuple(nu_k),
        gap=float(energies.min()),
        ground_energy=ground_energy,
        ground_energy_density=ground_energy / p.N,
    )


def tight_binding_deviation(p, n_points=1001):
    """Gets sup_k |E_k - E_tb| over a dense grid on [0, pi].

    :param p: Lattice parameters
    :type p: LatticeParams
    :param n_points: Grid size
    :type n_points: int
    :raises UnstableMode:
    :rtype: float
    """
    k = np.linspace(0, np.pi, n_points)
    return float(np.max(np.abs(dispersion_full(p, k) - dispersion_tb(p, k))))


def critical_field(ensemble, g, constants=None):
    """Gets the external field B* at which nu_s = 8g.

    Fields below B* keep nu_s above 8g.

    :param ensemble: Spin ensemble providing D
    :type ensemble: SpinEnsembleSpec
    :param g: Effective coupling (GHz, > 0)
    :type g: float
    :param constants: Physical constants
    :type constants: PhysicalConstants or None
    :raises RangeError:
    :raises NoStableField:
    :return: Field (T)
    :rtype: float
    """
    constants = constants or PhysicalConstants()
    if not is_finite(g) or g <= 0:
        raise RangeError(f'g must be positive, got {g!r}')
    splitting = ensemble.zero_field_splitting
    if 8 * g >= splitting:
        raise NoStableField(
            f'8g = {8 * g:.6g} GHz >= D = {splitting:.6g} GHz: no field '
            f'gives a stable array with positive nu_s'
        )
    return (splitting - 8 * g) / constants.zeeman_slope


def nu_q_for_ratio(J, nu_s, ratio):
    """Solves J^2 (1/(nu_q - nu_s) + 1/(nu_q + nu_s)) = ratio * nu_s.

    :param J: Coupling (GHz, > 0)
    :type J: float
    :param nu_s: Ensemble frequency (GHz, > 0)
    :type nu_s: float
    :param ratio: Requested g / nu_s (> 0)
    :type ratio: float
    :raises RangeError:
    :return: Qubit frequency nu_q > nu_s (GHz)
    :rtype: float
    """
    for name, value in (('J', J), ('nu_s', nu_s), ('ratio', ratio)):
        if not is_finite(value) or value <= 0:
            raise RangeError(f'{name} must be positive, got {value!r}')
    return (J ** 2 + math.sqrt(J ** 4 + ratio ** 2 * nu_s ** 4)) / (
        ratio * nu_s
    )
