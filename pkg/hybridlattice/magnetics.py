"""Loop field at an NV position and the resulting spin couplings.

The NV center sits on the symmetry line of a rectangular loop (sides a along
z and b), a distance z from the near edge; only on-axis positions are
modelled.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from hybridlattice.core_types import PhysicalConstants
from hybridlattice.errors import RangeError, SingularPosition
from hybridlattice.utils import obj_to_dict

logger = logging.getLogger(__name__)

MIDPOINT = 0.5


@dataclass(frozen=True)
class CouplingEstimate(object):
    """Field at z/L = 0.5 and the couplings it implies."""

    field_at_midpoint: float
    single_spin_coupling: float
    spin_count: float
    collective_coupling: float

    def to_dict(self):
        """Dumps self to dictionary.

        :rtype: dict
        """
        return obj_to_dict(self)


def loop_field(qubit, z_nv, constants=None):
    """Evaluates the Biot-Savart field of the loop on its symmetry line.

    B(z) = (mu0 Ip / pi) {[(z+a)/b + b/(4(z+a))] / sqrt((b/2)^2 + (a+z)^2)
                          - [b/(4z) + z/b] / sqrt((b/2)^2 + z^2)}

    Lengths in um and current in uA cancel their prefixes, so the result is
    in tesla. The sign is kept; couplings use the magnitude.

    :param qubit: Flux qubit providing Ip, a and b
    :type qubit: FluxQubitSpec
    :param z_nv: Distance from the near loop edge (um), scalar or array
    :type z_nv: float or numpy.ndarray
    :param constants: Physical constants
    :type constants: PhysicalConstants or None
    :raises SingularPosition:
    :return: Signed field (T)
    :rtype: float or numpy.ndarray
    """
    constants = constants or PhysicalConstants()
    z = np.asarray(z_nv, dtype=float)
    if np.any(~np.isfinite(z)) or np.any(z <= 0):
        raise SingularPosition(
            f'Loop field is singular at z_nv <= 0, got {z_nv!r}'
        )
    a = qubit.loop_a
    b = qubit.loop_b
    far = z + a
    far_term = (far / b + b / (4 * far)) / np.sqrt((b / 2) ** 2 + far ** 2)
    near_term = (b / (4 * z) + z / b) / np.sqrt((b / 2) ** 2 + z ** 2)
    field = constants.mu0 * qubit.persistent_current / math.pi * (
        far_term - near_term
    )
    if field.ndim == 0:
        return float(field)
    return field


def single_spin_coupling(field, constants=None):
    """Gets J^(m) = g_e muB/h |B| / sqrt(2).

    :param field: Magnetic field (T), scalar or array
    :type field: float or numpy.ndarray
    :param constants: Physical constants
    :type constants: PhysicalConstants or None
    :return: Coupling (GHz)
    :rtype: float or numpy.ndarray
    """
    constants = constants or PhysicalConstants()
    coupling = constants.zeeman_slope * np.abs(field) / math.sqrt(2)
    if np.ndim(coupling) == 0:
        return float(coupling)
    return coupling


def collective_coupling(qubit, ensemble, constants=None):
    """Estimates the qubit's collective coupling to an adjoining ensemble.

    The field at z = L/2 stands for the average over the crystal, and
    J = sqrt(n) J^(m) with n = density x height x L x length, where length
    defaults to the loop's long side b.

    :param qubit: Flux qubit
    :type qubit: FluxQubitSpec
    :param ensemble: Spin ensemble
    :type ensemble: SpinEnsembleSpec
    :param constants: Physical constants
    :type constants: PhysicalConstants or None
    :raises SingularPosition:
    :return: The estimate
    :rtype: CouplingEstimate
    """
    width = ensemble.crystal_width_L
    if width <= 0:
        raise SingularPosition(f'Crystal width must be positive, got {width}')
    field = abs(loop_field(qubit, MIDPOINT * width, constants))
    j_single = single_spin_coupling(field, constants)
    n = ensemble.spin_count(default_length=qubit.loop_b)
    estimate = CouplingEstimate(
        field_at_midpoint=field,
        single_spin_coupling=j_single,
        spin_count=n,
        collective_coupling=math.sqrt(n) * j_single,
    )
    logger.debug(
        'Ip=%s uA a=%s um b=%s um L=%s um: |B|=%.4g T, n=%.4g, J=%.4g GHz',
        qubit.persistent_current,
        qubit.loop_a,
        qubit.loop_b,
        width,
        field,
        n,
        estimate.collective_coupling,
    )
    return estimate


def coupling_profile(qubit, L, grid, constants=None):
    """Evaluates J^(m) along the crystal for plotting.

    :param qubit: Flux qubit
    :type qubit: FluxQubitSpec
    :param L: Crystal width (um)
    :type L: float
    :param grid: Positions z/L, each strictly inside (0, 1)
    :type grid: iterable
    :param constants: Physical constants
    :type constants: PhysicalConstants or None
    :raises RangeError:
    :return: List of (z/L, J^(m) in GHz)
    :rtype: list
    """
    points = np.asarray(list(grid), dtype=float)
    outside = points[(points <= 0) | (points >= 1) | ~np.isfinite(points)]
    if outside.size:
        raise RangeError(
            f'Profile positions must lie in (0, 1), got {outside[0]!r}'
        )
    if not points.size:
        return []
    couplings = single_spin_coupling(
        loop_field(qubit, points * L, constants), constants
    )
    return [
        (float(point), float(value))
        for point, value in zip(points, np.atleast_1d(couplings))
    ]


def profile_grid(points):
    """Makes the interior grid z/L = (i + 1) / (points + 1).

    One point gives the midpoint 0.5.

    :param points: Number of grid points (>= 1)
    :type points: int
    :raises RangeError:
    :rtype: list
    """
    if points < 1:
        raise RangeError(f'At least one profile point is needed, got {points}')
    return [(i + 1) / (points + 1) for i in range(points)]
