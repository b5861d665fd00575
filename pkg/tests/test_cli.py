import csv
import json

import pytest

from conftest import UNIFORM_G
from hybridlattice import __version__
from hybridlattice.cli import (
    EXIT_OK,
    EXIT_RESONANCE,
    EXIT_UNSTABLE,
    EXIT_USAGE,
    EXIT_VALIDATION,
    build_parser,
    exit_code_for,
    main,
)
from hybridlattice.errors import (
    ConfigError,
    HybridLatticeError,
    NoStableField,
    ResonanceError,
    ValidationFailure,
)


def _read_csv(path):
    with open(path, newline='') as csv_file:
        return list(csv.reader(csv_file))


def _read_json(path):
    with open(path) as json_file:
        return json.load(json_file)


@pytest.fixture
def out(tmp_path):
    return tmp_path.joinpath('result')


def test_coupling_profile_midpoint(out):
    code = main(
        [
            'coupling-profile',
            '--preset',
            'profile-geometries',
            '--points',
            '1',
            '--out',
            str(out),
        ]
    )
    assert code == EXIT_OK
    header, *rows = _read_csv(out)
    assert header == ['qubit', 'z_over_L', 'J_m_GHz']
    assert [row[0] for row in rows] == ['1', '2', '3']
    assert all(float(row[1]) == 0.5 for row in rows)
    values = [float(row[2]) for row in rows]
    assert 0 < values[0] < values[1] < values[2]


def test_coupling_profile_json(out):
    args = ['coupling-profile', '--preset', 'small-loop', '--out', str(out)]
    assert main(args + ['--format', 'json', '--points', '9']) == EXIT_OK
    series = _read_json(out)['series']
    assert len(series) == 1
    assert series[0]['z_over_L'][4] == 0.5
    values = series[0]['J_m_GHz']
    assert all(later < earlier for earlier, later in zip(values, values[1:]))


def test_effective_params(out):
    code = main(
        ['effective-params', '--preset', 'uniform-chain', '--out', str(out)]
    )
    assert code == EXIT_OK
    data = _read_json(out)
    params = data['effective_params']
    assert params['g_hop_GHz'] == pytest.approx(
        [UNIFORM_G, UNIFORM_G], rel=1e-9
    )
    assert params['nu_prime_GHz'][0] == pytest.approx(1 - UNIFORM_G)
    assert data['coefficients']['pairs'] == [[1, 1], [1, 2], [2, 2], [2, 3]]
    assert data['warnings'] == []


def test_effective_params_from_geometry(out):
    main(['effective-params', '--preset', 'long-loop', '--out', str(out)])
    data = _read_json(out)
    assert data['couplings_GHz'][0][0] == pytest.approx(0.25, rel=0.05)


def test_effective_params_warns(out, data_path, caplog):
    code = main(
        [
            'effective-params',
            '--config',
            str(data_path('close-detuning.json')),
            '--out',
            str(out),
        ]
    )
    assert code == EXIT_OK
    assert len(_read_json(out)['warnings']) == 2
    assert any(r.levelname == 'WARNING' for r in caplog.records)


def test_effective_params_csv(out):
    main(
        [
            'effective-params',
            '--preset',
            'uniform-chain',
            '--format',
            'csv',
            '--out',
            str(out),
        ]
    )
    header, *rows = _read_csv(out)
    assert header[0] == 'ensemble'
    assert len(rows) == 3
    assert rows[-1][-1] == ''


def test_dispersion(out):
    code = main(['dispersion', '--preset', 'uniform-chain', '--out', str(out)])
    assert code == EXIT_OK
    header, *rows = _read_csv(out)
    assert header == ['k_rad', 'E_full_GHz', 'mu', 'nu']
    assert len(rows) == 64
    assert float(rows[0][0]) == 0.0
    summary = _read_json(f'{out}.summary.json')
    assert summary['gap_GHz'] == pytest.approx(0.910259, abs=1e-6)
    assert float(rows[0][1]) == summary['gap_GHz']
    assert summary['stable'] is True
    assert summary['margin_GHz'] == pytest.approx(0.8286, abs=1e-4)
    assert summary['E_g_GHz'] < 0
    assert summary['critical_field_T'] == pytest.approx(0.0963, abs=5e-4)


def test_dispersion_tight_binding(out):
    main(
        [
            'dispersion',
            '--preset',
            'uniform-chain',
            '--tight-binding',
            '--points',
            '8',
            '--out',
            str(out),
        ]
    )
    header, *rows = _read_csv(out)
    assert header == ['k_rad', 'E_full_GHz', 'E_tb_GHz', 'mu', 'nu']
    assert len(rows) == 8
    assert all(float(row[2]) >= float(row[1]) for row in rows)


def test_dispersion_sites_option(out):
    args = ['dispersion', '--preset', 'uniform-chain', '--out', str(out)]
    assert main(args + ['--sites', '16']) == EXIT_OK
    assert _read_json(f'{out}.summary.json')['sites'] == 16
    assert main(args + ['--sites', '1']) == EXIT_USAGE


def test_dispersion_unstable(out, data_path):
    args = [
        'dispersion',
        '--config',
        str(data_path('unstable-lattice.json')),
        '--out',
        str(out),
    ]
    assert main(args) == EXIT_UNSTABLE
    assert main(args + ['--allow-unstable', '--format', 'json']) == EXIT_OK
    data = _read_json(out)
    assert data['stable'] is False
    assert data['gap_GHz'] is None
    assert data['unstable_k_range_rad'][0] == 0.0
    assert min(data['k_rad']) > 1.3


def test_validate(out):
    code = main(['validate', '--preset', 'uniform-chain', '--out', str(out)])
    assert code == EXIT_OK
    report = _read_json(out)
    assert report['passed'] is True
    assert set(report['checks']) == {
        'generator_residual',
        'effective_deviation',
        'coupling_scaling',
        'cutoff_convergence',
        'symplectic_oracle',
        'tight_binding_bound',
    }
    assert report['seed'] == 0


def test_validate_small_cutoff(out):
    code = main(
        [
            'validate',
            '--preset',
            'uniform-chain',
            '--cutoff',
            '2',
            '--out',
            str(out),
        ]
    )
    assert code == EXIT_VALIDATION
    report = _read_json(out)
    assert report['passed'] is False
    assert report['checks']['cutoff_convergence']['passed'] is False
    assert out.with_name('result.manifest.json').exists()


def test_validate_resonant(data_path, out):
    code = main(
        [
            'validate',
            '--config',
            str(data_path('resonant.json')),
            '--out',
            str(out),
        ]
    )
    assert code == EXIT_RESONANCE


def test_validate_too_few_levels(out):
    code = main(
        ['validate', '--preset', 'uniform-chain', '--levels', '1']
        + ['--out', str(out)]
    )
    assert code == EXIT_USAGE


def test_stability_scan(out):
    code = main(
        [
            'stability-scan',
            '--preset',
            'uniform-chain',
            '--nus-range',
            '0.2',
            '0.2',
            '1',
            '--g-range',
            '0',
            '0.05',
            '11',
            '--out',
            str(out),
        ]
    )
    assert code == EXIT_OK
    header, *rows = _read_csv(out)
    assert header == [
        'nu_s_GHz',
        'g_GHz',
        'stable',
        'gap_GHz',
        'critical_field_T',
    ]
    assert len(rows) == 11
    for _, g, stable, gap, _ in rows:
        if float(g) < 0.024:
            assert stable == 'true'
            assert float(gap) > 0
        elif float(g) > 0.026:
            assert stable == 'false'
            assert gap == ''
    assert rows[0][4] == ''


def test_stability_scan_j_range(out):
    code = main(
        [
            'stability-scan',
            '--preset',
            'uniform-chain',
            '--nus-range',
            '0.5',
            '1.5',
            '3',
            '--j-range',
            '0.1',
            '0.3',
            '3',
            '--out',
            str(out),
        ]
    )
    assert code == EXIT_OK
    header, *rows = _read_csv(out)
    assert header[1] == 'J_GHz'
    assert len(rows) == 9


@pytest.mark.parametrize(
    'nus,couplings',
    (
        (('1', '0.5', '3'), ('0', '0.1', '3')),
        (('1', '2', '3'), ('0', '0', '3')),
    ),
)
def test_stability_scan_degenerate_range(out, nus, couplings):
    args = ['stability-scan', '--preset', 'uniform-chain', '--out', str(out)]
    args += ['--nus-range', *nus, '--g-range', *couplings]
    assert main(args) == EXIT_USAGE


def test_stability_scan_needs_one_coupling_range():
    with pytest.raises(SystemExit) as exc_info:
        main(['stability-scan', '--preset', 'uniform-chain'])
    assert exc_info.value.code == 2


def test_solve_qubit_frequency(capsys):
    code = main(
        [
            'solve-qubit-frequency',
            '--J',
            '0.25',
            '--nu-s',
            '1',
            '--ratio',
            '0.12',
        ]
    )
    assert code == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data['nu_q_GHz'] == pytest.approx(1.648, abs=1e-3)
    assert data['g_GHz'] == pytest.approx(0.12)


def test_solve_qubit_frequency_from_preset(capsys):
    main(['solve-qubit-frequency', '--preset', 'uniform-chain'])
    data = json.loads(capsys.readouterr().out)
    assert data['J_GHz'] == 0.25
    assert data['nu_s_GHz'] == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize(
    'args',
    (
        ['dispersion'],
        ['dispersion', '--preset', 'honeycomb'],
        ['dispersion', '--config', 'absent.json'],
    ),
)
def test_bad_source(args):
    assert main(args) == EXIT_USAGE


def test_missing_subcommand():
    with pytest.raises(SystemExit) as exc_info:
        main([])
    assert exc_info.value.code == 2


def test_version(capsys):
    with pytest.raises(SystemExit):
        build_parser().parse_args(['--version'])
    assert __version__ in capsys.readouterr().out


@pytest.mark.parametrize(
    'command',
    (
        ['dispersion', '--tight-binding'],
        ['effective-params'],
        ['stability-scan', '--nus-range', '0.5', '1', '3', '--g-range',
         '0', '0.1', '5'],
    ),
)
def test_outputs_are_deterministic(tmp_path, command):
    first, second = tmp_path.joinpath('a'), tmp_path.joinpath('b')
    for path in (first, second):
        base = command + ['--preset', 'uniform-chain', '--out', str(path)]
        assert main(base) == EXIT_OK
    assert first.read_bytes() == second.read_bytes()


def test_manifest(out):
    main(['dispersion', '--preset', 'uniform-chain', '--out', str(out)])
    manifest = _read_json(f'{out}.manifest.json')
    assert manifest['command'] == 'dispersion'
    assert manifest['source'] == 'preset:uniform-chain'
    assert manifest['version'] == __version__
    assert manifest['lattice']['N'] == 64
    assert manifest['outputs'] == [str(out), f'{out}.summary.json']
    assert manifest['options']['out'] == str(out)
    assert manifest['timestamp']


@pytest.mark.parametrize(
    'exc,code',
    (
        (ConfigError('key', 'message'), EXIT_USAGE),
        (ResonanceError((1, 1), 0.0), EXIT_RESONANCE),
        (NoStableField('none'), EXIT_UNSTABLE),
        (ValidationFailure(['a']), EXIT_VALIDATION),
        (HybridLatticeError('other'), 1),
    ),
)
def test_exit_code_for(exc, code):
    assert exit_code_for(exc) == code
