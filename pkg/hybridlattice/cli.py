"""Command-line front end.

Every command reads a configuration (--config FILE or --preset NAME), writes
its data to --out (stdout when omitted) and, next to a data file, a
<out>.manifest.json recording the resolved inputs.
"""
import argparse
import csv
import logging
import math
import sys
import warnings
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from hybridlattice import __version__
from hybridlattice.config import (
    chain_from_dict,
    chain_to_dict,
    lattice_params_from_dict,
    load_config,
)
from hybridlattice.dispersive import (
    DETUNING_FACTOR,
    VALIDATION_LEVELS,
    dispersive_coefficients,
    effective_params,
    validate_dispersive,
)
from hybridlattice.errors import (
    ConfigError,
    DetuningWarning,
    DimensionError,
    DivergentCoefficients,
    HybridLatticeError,
    NonPositiveSplitting,
    NoStableField,
    RangeError,
    ResonanceError,
    SingularPosition,
    UnstableMode,
    ValidationFailure,
)
from hybridlattice.hilbert import DEFAULT_CUTOFF
from hybridlattice.lattice import (
    DEFAULT_POINTS,
    LatticeParams,
    brillouin_scan,
    critical_field,
    dispersion_full,
    finite_chain_spectrum,
    lattice_g,
    nu_q_for_ratio,
    stability_check,
    tight_binding_deviation,
)
from hybridlattice.magnetics import coupling_profile, profile_grid
from hybridlattice.presets import PresetStorage
from hybridlattice.utils import dumps, format_number, parallel_map

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_RESONANCE = 3
EXIT_UNSTABLE = 4
EXIT_VALIDATION = 5

EXIT_CODES = (
    ((ConfigError, RangeError, DimensionError), EXIT_USAGE),
    ((NonPositiveSplitting, SingularPosition), EXIT_USAGE),
    ((ResonanceError,), EXIT_RESONANCE),
    ((UnstableMode, NoStableField, DivergentCoefficients), EXIT_UNSTABLE),
    ((ValidationFailure,), EXIT_VALIDATION),
)

ORACLE_TOL = 1e-10
ORACLE_SITES = (2, 4, 8, 16)
ORACLE_SAMPLES = 5
TIGHT_BINDING_RATIOS = (16, 50, 100)

CHECK_HINTS = {
    'generator_residual': 'the generator does not cancel the interaction',
    'effective_deviation': (
        'the effective spectrum is off; the chain may be too close to '
        'resonance'
    ),
    'coupling_scaling': 'halving J did not shrink the deviation enough',
    'cutoff_convergence': (
        'the low spectrum moves when the Fock cutoff grows by 2; '
        'raise --cutoff'
    ),
    'symplectic_oracle': 'real-space and momentum-space energies disagree',
    'tight_binding_bound': 'tight-binding error exceeds 32 g^2 / nu_s',
}


@dataclass
class RunManifest(object):
    """Resolved inputs and outputs of one command invocation."""

    command: str
    source: str
    options: dict
    chain: dict = None
    lattice: dict = None
    outputs: list = field(default_factory=list)
    version: str = __version__
    timestamp: str = None

    def to_dict(self):
        """Dumps self to dictionary.

        :rtype: dict
        """
        return {
            'command': self.command,
            'source': self.source,
            'options': self.options,
            'chain': self.chain,
            'lattice': self.lattice,
            'outputs': self.outputs,
            'version': self.version,
            'timestamp': self.timestamp,
        }

    def write(self, path):
        """Stamps the manifest and writes it as JSON.

        :param path: Manifest path
        :type path: pathlib.Path
        :return: None
        """
        self.timestamp = datetime.now(timezone.utc).isoformat()
        Path(path).write_text(dumps(self.to_dict()) + '\n')


class _Run(object):
    """Per-invocation state: parsed arguments, inputs and the manifest."""

    def __init__(self, args):
        """Initializes an instance.

        :param args: Parsed command-line arguments
        :type args: argparse.Namespace
        """
        self.args = args
        self._data = None
        self._chain = None
        self.manifest = RunManifest(
            command=args.command,
            source=self.source,
            options={
                key: str(value) if isinstance(value, Path) else value
                for key, value in sorted(vars(args).items())
                if key not in ('handler', 'verbose')
            },
        )

    @property
    def source(self):
        """Describes where the configuration comes from."""
        if self.args.preset:
            return f'preset:{self.args.preset}'
        if self.args.config:
            return str(self.args.config)
        return ''

    @property
    def data(self):
        """Gets the configuration dictionary.

        :raises ConfigError:
        :rtype: dict
        """
        if self._data is None:
            if self.args.preset:
                self._data = PresetStorage().get_config(self.args.preset)
            elif self.args.config:
                self._data = load_config(self.args.config)
            else:
                raise ConfigError(
                    'config', 'give --config FILE or --preset NAME'
                )
        return self._data

    @property
    def chain(self):
        """Gets the parsed chain.

        :raises ConfigError:
        :rtype: ChainSpec
        """
        if self._chain is None:
            self._chain = chain_from_dict(self.data)
            self.manifest.chain = chain_to_dict(self._chain)
        return self._chain

    def lattice(self, sites=None):
        """Gets the lattice parameters, optionally with another site count.

        :rtype: LatticeParams
        """
        params = lattice_params_from_dict(self.data, self.chain)
        if sites is not None:
            try:
                params = replace(params, N=sites)
            except ConfigError as exc:
                raise ConfigError('--sites', exc.message)
        self.manifest.lattice = params.to_dict()
        return params

    def output_format(self, default):
        """Gets --format or the command's default."""
        return self.args.format or default

    def _open(self, path):
        if path is None:
            return sys.stdout
        return open(path, 'w', newline='')

    def _record(self, path):
        if path is not None:
            self.manifest.outputs.append(str(path))

    def write_json(self, data, path=None):
        """Writes JSON data to a path (--out by default).

        :return: None
        """
        path = self.args.out if path is None else path
        stream = self._open(path)
        try:
            stream.write(dumps(data) + '\n')
        finally:
            if stream is not sys.stdout:
                stream.close()
        self._record(path)

    def write_csv(self, header, rows):
        """Writes rows to --out as CSV.

        :param header: Column names
        :type header: list
        :param rows: Rows of numbers (None becomes an empty cell)
        :type rows: iterable
        :return: None
        """
        stream = self._open(self.args.out)
        try:
            writer = csv.writer(stream, lineterminator='\n')
            writer.writerow(header)
            for row in rows:
                writer.writerow(
                    [
                        cell if isinstance(cell, str) else format_number(cell)
                        for cell in row
                    ]
                )
        finally:
            if stream is not sys.stdout:
                stream.close()
        self._record(self.args.out)

    def sidecar(self, suffix):
        """Gets <out><suffix>, or None when writing to stdout."""
        if self.args.out is None:
            return None
        return Path(f'{self.args.out}{suffix}')

    def finish(self):
        """Writes the manifest next to --out.

        :return: None
        """
        path = self.sidecar('.manifest.json')
        if path is not None:
            self.manifest.write(path)
            logger.info('Wrote %s', path)


def _collect_warnings(func, *args, **kwargs):
    """Calls func, logging DetuningWarning messages once each."""
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter('always', DetuningWarning)
        result = func(*args, **kwargs)
    for message in dict.fromkeys(str(w.message) for w in caught):
        logger.warning(message)
    return result


def cmd_coupling_profile(run):
    """Writes J^(m)(z/L) for every configured qubit geometry."""
    chain = run.chain
    grid = profile_grid(run.args.points)
    series = []
    for index, qubit in enumerate(chain.qubits):
        width = chain.ensembles[index].crystal_width_L
        series.append(
            (index + 1, coupling_profile(qubit, width, grid, chain.constants))
        )
    logger.info('Profiled %d geometries on %d points', len(series), len(grid))
    if run.output_format('csv') == 'json':
        run.write_json(
            {
                'series': [
                    {
                        'qubit': qubit,
                        'z_over_L': [point for point, _ in profile],
                        'J_m_GHz': [value for _, value in profile],
                    }
                    for qubit, profile in series
                ]
            }
        )
    else:
        run.write_csv(
            ('qubit', 'z_over_L', 'J_m_GHz'),
            (
                (str(qubit), point, value)
                for qubit, profile in series
                for point, value in profile
            ),
        )
    return EXIT_OK


def cmd_effective_params(run):
    """Writes the dressed frequencies, couplings and generator coefficients."""
    chain = run.chain
    factor = run.args.detuning_factor
    coeffs = _collect_warnings(dispersive_coefficients, chain, factor)
    with warnings.catch_warnings():
        warnings.simplefilter('ignore', DetuningWarning)
        params = effective_params(chain, factor)
    if run.output_format('json') == 'csv':
        n = params.n_modes
        run.write_csv(
            ('ensemble', 'nu_prime_GHz', 'g_self_GHz', 'g_hop_next_GHz'),
            (
                (
                    str(j + 1),
                    params.nu_prime[j],
                    params.g_self[j],
                    params.g_hop[j] if j < n - 1 else None,
                )
                for j in range(n)
            ),
        )
    else:
        run.write_json(
            {
                'effective_params': params.to_dict(),
                'coefficients': coeffs.to_dict(),
                'couplings_GHz': [list(row) for row in chain.couplings],
                'nu_q_GHz': chain.nu_q,
                'nu_s_GHz': chain.nu_s,
                'warnings': list(coeffs.warnings),
            }
        )
    return EXIT_OK


def _critical_field_or_none(ensemble, g, constants):
    try:
        return critical_field(ensemble, g, constants)
    except (NoStableField, RangeError) as exc:
        logger.info('No critical field: %s', exc)
        return None


def _dispersion_summary(result, critical):
    summary = {
        'nu_s_GHz': result.params.nu_s,
        'g_GHz': result.params.g,
        'sites': result.params.N,
        'stable': result.stable,
        'margin_GHz': result.margin,
        'gapless': result.gapless,
        'gap_GHz': result.gap,
        'E_g_GHz': result.ground_energy,
        'E_g_per_site_GHz': result.ground_energy_density,
        'critical_field_T': critical,
        'points': len(result.k_values),
    }
    if not result.stable:
        summary['unstable_k_range_rad'] = list(result.unstable_k_range)
    return summary


def cmd_dispersion(run):
    """Writes the Bogoliubov band and its summary."""
    args = run.args
    chain = run.chain
    params = run.lattice(args.sites)
    result = brillouin_scan(params, args.points, args.allow_unstable)
    critical = _critical_field_or_none(
        chain.ensembles[0], params.g, chain.constants
    )
    summary = _dispersion_summary(result, critical)
    if result.stable:
        rows = [
            (k, energy, tb, mu, nu)
            for k, energy, tb, mu, nu in zip(
                result.k_values,
                result.E_k,
                result.E_tb,
                result.mu_k,
                result.nu_k,
            )
        ]
    else:
        tb = dict(zip(result.k_values, result.E_tb))
        rows = [
            (k, energy, tb[k], None, None) for k, energy in result.partial_E_k
        ]
    if run.output_format('csv') == 'json':
        summary['k_rad'] = [row[0] for row in rows]
        summary['E_full_GHz'] = [row[1] for row in rows]
        if args.tight_binding:
            summary['E_tb_GHz'] = [row[2] for row in rows]
        summary['mu'] = [row[3] for row in rows]
        summary['nu'] = [row[4] for row in rows]
        run.write_json(summary)
    else:
        header = ['k_rad', 'E_full_GHz', 'E_tb_GHz', 'mu', 'nu']
        if not args.tight_binding:
            header.remove('E_tb_GHz')
            rows = [(k, e, mu, nu) for k, e, _, mu, nu in rows]
        run.write_csv(header, rows)
        run.write_json(summary, run.sidecar('.summary.json'))
    return EXIT_OK


def _random_stable_params(rng, sites):
    nu_s = rng.uniform(0.5, 2.0)
    return LatticeParams(nu_s=nu_s, g=rng.uniform(0.0, nu_s / 10), N=sites)


def oracle_deviation(params):
    """Gets max |symplectic - analytic| energies on the N-site ring.

    :rtype: float
    """
    k = 2 * np.pi * np.arange(params.N) / params.N
    analytic = np.sort(dispersion_full(params, k))
    return float(np.max(np.abs(finite_chain_spectrum(params) - analytic)))


def lattice_checks(params, seed):
    """Runs the symplectic oracle and the tight-binding bound.

    :param params: Configured lattice
    :type params: LatticeParams
    :param seed: Seed for the random parameter samples
    :type seed: int
    :rtype: dict
    """
    rng = np.random.default_rng(seed)
    samples = [
        _random_stable_params(rng, sites)
        for sites in ORACLE_SITES
        for _ in range(ORACLE_SAMPLES)
    ]
    if stability_check(params)[0]:
        samples.append(replace(params, N=min(params.N, 64)))
    worst = max(parallel_map(oracle_deviation, samples))
    bounds = []
    for ratio in TIGHT_BINDING_RATIOS:
        sample = LatticeParams(nu_s=params.nu_s, g=params.nu_s / ratio)
        bounds.append(
            (
                tight_binding_deviation(sample),
                32 * sample.g ** 2 / sample.nu_s,
            )
        )
    deviations = [deviation for deviation, _ in bounds]
    tb_passed = all(d <= bound for d, bound in bounds) and all(
        later < earlier for earlier, later in zip(deviations, deviations[1:])
    )
    return {
        'symplectic_oracle': {
            'value': worst,
            'tolerance': ORACLE_TOL,
            'passed': worst < ORACLE_TOL,
        },
        'tight_binding_bound': {
            'value': deviations,
            'tolerance': [bound for _, bound in bounds],
            'passed': tb_passed,
        },
    }


def cmd_validate(run):
    """Runs every numerical check and fails with exit code 5 on a miss."""
    args = run.args
    chain = run.chain
    report = _collect_warnings(
        validate_dispersive,
        chain,
        cutoff=args.cutoff,
        levels=args.levels,
        detuning_factor=args.detuning_factor,
        include_mutual=args.include_mutual,
    )
    data = report.to_dict()
    data['checks'].update(lattice_checks(run.lattice(), args.seed))
    failed = [
        name for name, check in data['checks'].items() if not check['passed']
    ]
    data['passed'] = not failed
    data['seed'] = args.seed
    run.write_json(data)
    for name in failed:
        check = data['checks'][name]
        logger.error(
            '%s failed: %s (tolerance %s): %s',
            name,
            check['value'],
            check['tolerance'],
            CHECK_HINTS[name],
        )
    if failed:
        run.finish()
        raise ValidationFailure(failed)
    return EXIT_OK


def _grid(values, option):
    start, stop, count = values
    if not math.isfinite(start) or not math.isfinite(stop):
        raise RangeError(f'{option}: bounds must be finite')
    if count != int(count) or count < 1:
        raise RangeError(f'{option}: count must be a positive integer')
    count = int(count)
    if count > 1 and not start < stop:
        raise RangeError(f'{option}: start must be below stop')
    return np.linspace(start, stop, count)


def _stability_row(chain, nu_s, coupling, from_j):
    g = lattice_g(coupling, chain.nu_q[0], nu_s) if from_j else coupling
    params = LatticeParams(nu_s=nu_s, g=g, N=2)
    stable, _ = stability_check(params)
    gap = dispersion_full(params, 0.0) if stable else None
    critical = _critical_field_or_none(chain.ensembles[0], g, chain.constants)
    row = [nu_s, g, stable, gap, critical]
    if from_j:
        row.insert(1, coupling)
    return row


def cmd_stability_scan(run):
    """Writes stability, gap and B* over a (nu_s, g) or (nu_s, J) grid."""
    args = run.args
    chain = run.chain
    from_j = args.j_range is not None
    nus = _grid(args.nus_range, '--nus-range')
    couplings = _grid(
        args.j_range if from_j else args.g_range,
        '--j-range' if from_j else '--g-range',
    )
    if np.any(nus <= 0):
        raise RangeError('--nus-range: nu_s must be positive')
    if np.any(couplings < 0):
        raise RangeError('coupling values must be non-negative')
    cells = [(float(n), float(c)) for n in nus for c in couplings]
    logger.info('Scanning %d grid cells', len(cells))
    rows = parallel_map(
        lambda cell: _stability_row(chain, cell[0], cell[1], from_j), cells
    )
    header = ['nu_s_GHz', 'g_GHz', 'stable', 'gap_GHz', 'critical_field_T']
    if from_j:
        header.insert(1, 'J_GHz')
    if run.output_format('csv') == 'json':
        run.write_json({'columns': header, 'rows': rows})
    else:
        run.write_csv(header, rows)
    return EXIT_OK


def cmd_solve_qubit_frequency(run):
    """Writes the nu_q that gives a requested g / nu_s."""
    args = run.args
    coupling, nu_s = args.J, args.nu_s
    if coupling is None or nu_s is None:
        chain = run.chain
        coupling = chain.couplings[0][0] if coupling is None else coupling
        nu_s = chain.nu_s[0] if nu_s is None else nu_s
    nu_q = nu_q_for_ratio(coupling, nu_s, args.ratio)
    run.write_json(
        {
            'J_GHz': coupling,
            'nu_s_GHz': nu_s,
            'ratio': args.ratio,
            'nu_q_GHz': nu_q,
            'g_GHz': lattice_g(coupling, nu_q, nu_s),
        }
    )
    return EXIT_OK


def _range_option(parser, name, help_text, required=False):
    parser.add_argument(
        name,
        nargs=3,
        type=float,
        metavar=('START', 'STOP', 'COUNT'),
        required=required,
        help=help_text,
    )


def build_parser():
    """Builds the argument parser with one subcommand per operation.

    :rtype: argparse.ArgumentParser
    """
    common = argparse.ArgumentParser(add_help=False)
    source = common.add_mutually_exclusive_group()
    source.add_argument('--config', type=Path, help='JSON configuration file')
    source.add_argument(
        '--preset',
        help='packaged configuration: ' + ', '.join(PresetStorage().names()),
    )
    common.add_argument('--out', type=Path, help='output file, else stdout')
    common.add_argument('--format', choices=('csv', 'json'))
    common.add_argument('--seed', type=int, default=0)
    common.add_argument('-v', '--verbose', action='store_true')

    parser = argparse.ArgumentParser(
        prog='hybridlattice',
        description='Flux-qubit and NV-ensemble chains as bosonic lattices',
    )
    parser.add_argument(
        '--version', action='version', version=f'%(prog)s {__version__}'
    )
    commands = parser.add_subparsers(dest='command', required=True)

    profile = commands.add_parser(
        'coupling-profile', parents=[common], help='J^(m) along the crystal'
    )
    profile.add_argument('--points', type=int, default=99)
    profile.set_defaults(handler=cmd_coupling_profile)

    effective = commands.add_parser(
        'effective-params', parents=[common], help='dressed mode parameters'
    )
    effective.add_argument(
        '--detuning-factor', type=float, default=DETUNING_FACTOR
    )
    effective.set_defaults(handler=cmd_effective_params)

    dispersion = commands.add_parser(
        'dispersion', parents=[common], help='Bogoliubov band of the array'
    )
    dispersion.add_argument('--sites', type=int)
    dispersion.add_argument('--points', type=int, default=DEFAULT_POINTS)
    dispersion.add_argument('--allow-unstable', action='store_true')
    dispersion.add_argument('--tight-binding', action='store_true')
    dispersion.set_defaults(handler=cmd_dispersion)

    validate = commands.add_parser(
        'validate', parents=[common], help='run the numerical checks'
    )
    validate.add_argument('--cutoff', type=int, default=DEFAULT_CUTOFF)
    validate.add_argument('--levels', type=int, default=VALIDATION_LEVELS)
    validate.add_argument(
        '--detuning-factor', type=float, default=DETUNING_FACTOR
    )
    validate.add_argument('--include-mutual', action='store_true')
    validate.set_defaults(handler=cmd_validate)

    scan = commands.add_parser(
        'stability-scan', parents=[common], help='stability over a grid'
    )
    _range_option(scan, '--nus-range', 'nu_s grid (GHz)', required=True)
    couplings = scan.add_mutually_exclusive_group(required=True)
    _range_option(couplings, '--g-range', 'g grid (GHz)')
    _range_option(
        couplings, '--j-range', 'J grid (GHz); g follows from nu_q of qubit 1'
    )
    scan.set_defaults(handler=cmd_stability_scan)

    solve = commands.add_parser(
        'solve-qubit-frequency',
        parents=[common],
        help='nu_q giving a requested g / nu_s',
    )
    solve.add_argument('--ratio', type=float, default=0.12)
    solve.add_argument('--J', type=float, help='coupling (GHz)')
    solve.add_argument('--nu-s', type=float, help='ensemble frequency (GHz)')
    solve.set_defaults(handler=cmd_solve_qubit_frequency)
    return parser


def exit_code_for(exc):
    """Maps a library error to the process exit code.

    :type exc: HybridLatticeError
    :rtype: int
    """
    for classes, code in EXIT_CODES:
        if isinstance(exc, classes):
            return code
    return EXIT_FAILURE


def main(argv=None):
    """Runs the command line.

    :param argv: Arguments without the program name, defaults to sys.argv
    :type argv: list or None
    :return: Exit code
    :rtype: int
    """
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format='%(levelname)s %(name)s: %(message)s',
        stream=sys.stderr,
    )
    run = _Run(args)
    try:
        code = args.handler(run)
    except HybridLatticeError as exc:
        logger.error('%s', exc)
        return exit_code_for(exc)
    run.finish()
    return code
