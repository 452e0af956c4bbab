"""
Command line interface tests for topos-measure
"""

import re

import pytest

from topos_measure import __version__

from .conftest import FIXTURES, ROOT, report_of, run_cli, statuses

# relative to the working directory of run_cli
Z2 = (FIXTURES / "z2_abc.json").relative_to(ROOT).as_posix()
KMS = (FIXTURES / "kms_e12.json").relative_to(ROOT).as_posix()
MINIMAL = (FIXTURES / "minimal.json").relative_to(ROOT).as_posix()


def _without_timing(report):
    report = dict(report)
    report.pop('wall_time')
    return report


def _masked(stdout: str) -> str:
    """Raw report bytes with the wall time zeroed."""
    return re.sub(r'"wall_time": [^,\n]+', '"wall_time": 0', stdout)


class TestCLI:
    """Test command line interface functionality"""

    def test_help_command(self):
        """Test --help command"""
        result = run_cli('--help')

        assert result.returncode == 0
        assert 'Invariant measures and modular flow' in result.stdout
        for command in ('validate', 'orbits', 'measure-check', 'change-of-vars', 'extend', 'glue',
                        'chi', 'rn', 'modular-flow', 'kms', 'trace', 'state'):
            assert command in result.stdout

    def test_version_command(self):
        """Test --version command"""
        result = run_cli('--version')

        assert result.returncode == 0
        assert f'topos-measure {__version__}' in result.stdout

    def test_no_command_prints_help(self):
        result = run_cli()
        assert result.returncode == 0
        assert 'Available commands' in result.stdout

    def test_unknown_flag(self):
        result = run_cli('validate', MINIMAL, '--frobnicate')
        assert result.returncode == 2
        assert 'Usage error' in result.stderr


class TestValidateCommand:
    """Test the validate command"""

    def test_minimal_model(self):
        result = run_cli('validate', MINIMAL)

        assert result.returncode == 0
        report = report_of(result)
        assert report['command'] == 'validate'
        assert report['results']['objects'] == 1
        assert all(c['status'] == 'pass' for c in report['checks'])

    def test_missing_config(self, temp_dir):
        result = run_cli('validate', str(temp_dir / "nowhere.json"))

        assert result.returncode == 1
        assert 'not found' in result.stderr

    def test_dangling_morphism(self, write_config, z2_model):
        """Test a broken groupoid reports its JSON pointer"""
        z2_model['groupoid']['morphisms'].append({'name': 'k', 'src': 's', 'dst': 't'})
        result = run_cli('validate', str(write_config(z2_model)))

        assert result.returncode == 1
        assert '/groupoid/morphisms' in result.stderr
        assert result.stdout == ''

    def test_ambiguous_measure_is_usage_error(self):
        result = run_cli('trace', Z2)
        assert result.returncode == 2
        assert '--measure' in result.stderr


class TestMeasureCommands:
    """Test commands on invariant measures and the modular bundle"""

    def test_measure_check(self):
        result = run_cli('measure-check', Z2, '--measure', 'mu')

        assert result.returncode == 0
        report = report_of(result)
        assert statuses(report['checks'])['divides:n=inf'] == 'n/a'
        assert report['results']['mass'] == {'G': 1, 'X': "3/2", 'pair': 2}

    def test_extend_with_two_covers(self):
        result = run_cli('extend', Z2, '--measure', 'mu', '--map', 'fold', '--map', 'swap')

        assert result.returncode == 0
        checks = statuses(report_of(result)['checks'])
        assert checks['covers-agree'] == 'pass'
        assert checks['fiber-product-oracle'] == 'pass'

    def test_glue_descends(self):
        result = run_cli('glue', Z2, '--measure', 'split', '--map', 'fold')

        assert result.returncode == 0
        assert report_of(result)['results']['glued'] == {'g0': 3}

    def test_glue_reports_descent_witness(self):
        result = run_cli('glue', Z2, '--measure', 'broken', '--map', 'fold')

        assert result.returncode == 1
        descent = [c for c in report_of(result)['checks'] if c['name'] == 'descent'][0]
        assert descent['status'] == 'fail'
        assert descent['witness'] == "(u0,w0)"

    def test_change_of_vars(self):
        result = run_cli('change-of-vars', Z2, '--measure', 'mu', '--map', 'collapse')

        assert result.returncode == 0
        assert statuses(report_of(result)['checks'])['change-of-variables'] == 'pass'

    def test_chi_checks_each_map_into_the_object(self):
        result = run_cli('chi', Z2, '--object', 'G', '--seed', '2')

        assert result.returncode == 0
        checks = statuses(report_of(result)['checks'])
        for name in ('fold', 'swap'):
            assert checks[f'naturality:{name}'] == 'pass'
            assert checks[f'slice-measure:{name}'] == 'pass'
            assert checks[f'pullback-additive:{name}'] == 'pass'
        assert 'naturality:crush' not in checks


class TestModularCommands:
    """Test the modular flow, KMS and trace commands"""

    def test_kms_boundary_values(self):
        result = run_cli('kms', KMS, '--u', 'u', '--v', 'v', '--t-grid', '-2:2:0.5')

        assert result.returncode == 0
        report = report_of(result)
        assert report['inputs']['t_grid'] == '-2:2:0.5'
        assert len(report['results']['t_grid']) == 9
        assert report['results']['F(0)']['re'] == pytest.approx(1.0)
        assert report['results']['F(0)']['im'] == pytest.approx(0.0, abs=1e-12)
        assert report['results']['F(-i)']['re'] == pytest.approx(2.0)

    def test_kms_operator_file(self):
        """Test an operator given as a file next to the model"""
        result = run_cli('kms', KMS, '--u', 'u.json', '--v', 'v')
        assert result.returncode == 0

    def test_trace_fails_off_component_constant(self):
        result = run_cli('trace', Z2, '--measure', 'lam')

        assert result.returncode == 1
        witness = [c for c in report_of(result)['checks'] if c['name'] == 'trace-witness'][0]
        assert witness['status'] == 'fail'
        assert witness['deviation'] == pytest.approx(2.0)

    def test_trace_passes_on_flat_density(self):
        result = run_cli('trace', Z2, '--measure', 'flat')

        assert result.returncode == 0
        assert report_of(result)['results']['component_constant'] is True

    def test_modular_flow(self):
        result = run_cli('modular-flow', Z2, '--measure', 'lam', '--seed', '3')

        assert statuses(report_of(result)['checks'])['theta-oracle'] == 'pass'

    def test_modular_flow_reports_flowed_operator(self):
        result = run_cli('modular-flow', Z2, '--measure', 'lam', '--operator', 'flip', '--t-grid', '-1:1:0.5')

        flowed = report_of(result)['results']['flowed']
        assert flowed['t'] == 1.0
        assert flowed['operator'] == {'carrier': 'X', 'entries': [['a', 'b', 1.0, 0.0], ['b', 'a', 1.0, 0.0]]}

    def test_bad_t_grid(self):
        result = run_cli('kms', KMS, '--u', 'u', '--v', 'v', '--t-grid', '2:-2:1')
        assert result.returncode == 2
        assert '--t-grid' in result.stderr


class TestOutput:
    """Test report formats and determinism"""

    def test_reports_are_deterministic(self):
        args = ('trace', Z2, '--measure', 'flat', '--seed', '11')
        first, second = run_cli(*args), run_cli(*args)

        assert _without_timing(report_of(first)) == _without_timing(report_of(second))

    def test_seed_from_environment(self, monkeypatch):
        monkeypatch.setenv('TOPOS_MEASURE_SEED', '5')
        assert report_of(run_cli('validate', MINIMAL))['seed'] == 5

    def test_text_output(self):
        result = run_cli('validate', MINIMAL, '--text')

        assert result.returncode == 0
        assert 'All checks passed' in result.stdout


class TestGoldenReports:
    """Test report bytes against golden files and across repeated runs"""

    @pytest.mark.parametrize("golden, args", [
        ("validate_minimal.json", ('validate', MINIMAL)),
        ("orbits_minimal.json", ('orbits', MINIMAL)),
        ("rn_z2_abc.json", ('rn', Z2, '--mu', 'rn_mu', '--nu', 'rn_nu', '--object', 'X')),
    ])
    def test_matches_golden(self, golden, args):
        result = run_cli(*args, '--seed', '0')

        assert result.returncode == 0
        assert _masked(result.stdout) == (FIXTURES / "golden" / golden).read_text()

    @pytest.mark.parametrize("args", [
        ('validate', Z2),
        ('orbits', Z2),
        ('measure-check', Z2, '--measure', 'mu'),
        ('chi', Z2, '--object', 'G'),
        ('modular-flow', Z2, '--measure', 'lam', '--operator', 'flip', '--t-grid', '-1:1:0.5'),
        ('kms', KMS, '--u', 'u', '--v', 'v', '--t-grid', '-2:2:0.5'),
        ('trace', Z2, '--measure', 'lam'),
    ])
    def test_byte_identical_across_runs(self, args):
        first, second = run_cli(*args, '--seed', '7'), run_cli(*args, '--seed', '7')

        assert first.stdout
        assert _masked(first.stdout) == _masked(second.stdout)
        assert first.returncode == second.returncode
