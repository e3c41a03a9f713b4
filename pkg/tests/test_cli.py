import json

import pytest
from click.testing import CliRunner

from interfere import __version__
from interfere.cli import cli

P5_EDGES = "0 1\n1 2\n2 3\n3 4\n"


@pytest.fixture
def runner(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv('HOME', str(tmp_path))
    return CliRunner()


def write(path, text):
    path.write_text(text)
    return str(path)


def test_version(runner):
    result = runner.invoke(cli, ['--version'])
    assert result.exit_code == 0
    assert __version__ in result.output


def test_unknown_command(runner):
    assert runner.invoke(cli, ['simulate']).exit_code == 2


class TestGraphCommands:
    def test_summary_of_a_file(self, runner, tmp_path):
        path = write(tmp_path / 'p5.edges', P5_EDGES)
        result = runner.invoke(cli, ['summary', '--graph', path])
        assert result.exit_code == 0, result.output
        assert result.output == "network,nodes,edges,avg_degree,avg_pairwise_dist,diameter\np5,5,4,1.6,2.0,4\n"

    def test_summary_of_several_files(self, runner, tmp_path):
        a = write(tmp_path / 'a.edges', P5_EDGES)
        b = write(tmp_path / 'b.edges', "0 1\n1 2\n2 0\n")
        result = runner.invoke(cli, ['summary', '--graph', a, '--graph', b])
        assert result.exit_code == 0, result.output
        assert [line.split(',')[0] for line in result.output.splitlines()] == ['network', 'a', 'b']

    def test_summary_needs_a_graph_source(self, runner):
        assert runner.invoke(cli, ['summary']).exit_code == 2

    def test_summary_reads_distance_sampling_from_config(self, runner, tmp_path):
        path = write(tmp_path / 'p20.edges', ''.join(f"{i} {i + 1}\n" for i in range(19)))
        write(tmp_path / 'interfere.yaml', "default:\n  exact_distances: false\n  sample_size: 3\n")
        sampled = runner.invoke(cli, ['summary', '--graph', path])
        assert sampled.exit_code == 0, sampled.output
        assert "lower bound" in sampled.output

        exact = runner.invoke(cli, ['summary', '--graph', path, '--exact-distances'])
        assert exact.exit_code == 0, exact.output
        assert "lower bound" not in exact.output
        assert exact.output.splitlines()[-1].split(',')[-1] == '19'

    def test_summary_reports_bad_edge_list(self, runner, tmp_path):
        path = write(tmp_path / 'bad.edges', "0 1\n0 1 2\n")
        result = runner.invoke(cli, ['summary', '--graph', path])
        assert result.exit_code == 1
        assert "line 2" in result.output

    def test_gen_graph_is_seeded(self, runner):
        args = ['gen-graph', '--generator', 'erdos_renyi', '--n', '30', '--p', '0.2', '--seed', '4']
        first = runner.invoke(cli, args)
        second = runner.invoke(cli, args)
        assert first.exit_code == 0, first.output
        assert first.output == second.output
        assert first.output.startswith('# nodes 30 ')

    def test_gen_graph_requires_seed(self, runner):
        assert runner.invoke(cli, ['gen-graph', '--generator', 'erdos_renyi', '--p', '0.1']).exit_code == 2


class TestEstimate:
    def test_example(self, runner, tmp_path):
        w = write(tmp_path / 'w.csv', "w\n1\n1\n0\n0\n")
        y = write(tmp_path / 'y.csv', "y\n5\n3\n2\n0\n")
        result = runner.invoke(cli, ['estimate', '--treatments', w, '--outcomes', y, '--pi', '0.5'])
        assert result.exit_code == 0, result.output
        data = json.loads(result.output)
        assert (data['n'], data['n1'], data['n0']) == (4, 2, 2)
        assert data['tau_hat'] == pytest.approx(3.0)
        assert data['v_sutva'] == pytest.approx(2.0)
        assert data['tau_ht'] == pytest.approx(3.0)
        assert data['ci']['half_width'] == pytest.approx(1.959964 * 2 ** 0.5, abs=1e-5)

    def test_length_mismatch(self, runner, tmp_path):
        w = write(tmp_path / 'w.csv', "1\n0\n1\n0\n")
        y = write(tmp_path / 'y.csv', "1\n2\n3\n")
        result = runner.invoke(cli, ['estimate', '--treatments', w, '--outcomes', y])
        assert result.exit_code == 1
        assert "❌" in result.output

    def test_arm_too_small(self, runner, tmp_path):
        w = write(tmp_path / 'w.csv', "1\n0\n0\n0\n")
        y = write(tmp_path / 'y.csv', "1\n2\n3\n4\n")
        assert runner.invoke(cli, ['estimate', '--treatments', w, '--outcomes', y]).exit_code == 1


class TestDiagnostics:
    def test_dependency_of_a_path(self, runner, tmp_path):
        path = write(tmp_path / 'p5.edges', P5_EDGES)
        edges_out = tmp_path / 'dep.edges'
        result = runner.invoke(cli, ['diagnose-dependency', '--graph', path, '--rho-max', '1', '--brute-force',
                                     '--weak-h', '2', '--samples', '3', '--edges-out', str(edges_out)])
        assert result.exit_code == 0, result.output
        data = json.loads(result.output[result.output.index('{'):])
        assert data['max_degree'] == 4
        assert data['edges'] == 7
        assert data['brute_force_agrees'] is True
        assert data['weak_interference']['max'] == 0.0
        assert edges_out.exists()

    def test_degree_rate(self, runner):
        result = runner.invoke(cli, ['diagnose-dependency', '--generator', 'watts_strogatz', '--k', '4',
                                     '--beta', '0.0', '--n', '50', '--rho-max', '1', '--sizes', '50,100,200'])
        assert result.exit_code == 0, result.output
        rate = json.loads(result.output)['degree_rate']
        assert [row['d'] for row in rate['rows']] == [8, 8, 8]
        assert rate['flag_quarter'] is False

    def test_stein_bound_from_moments(self, runner, tmp_path):
        moments = write(tmp_path / 'm.csv', "fourth,third\n0.1,0.2\n0.3,0.4\n")
        result = runner.invoke(cli, ['stein-bound', '--moments', moments, '--d', '0', '--sigma-sq', '1'])
        assert result.exit_code == 0, result.output
        data = json.loads(result.output)
        assert data['bound'] == 0.0
        assert data['label'] == 'bound shape, constants unspecified'

    def test_stein_bound_needs_degree(self, runner, tmp_path):
        moments = write(tmp_path / 'm.csv', "0.1,0.2\n")
        assert runner.invoke(cli, ['stein-bound', '--moments', moments]).exit_code == 2

    def test_stein_bound_from_a_model(self, runner, tmp_path):
        path = write(tmp_path / 'p5.edges', P5_EDGES)
        result = runner.invoke(cli, ['stein-bound', '--graph', path, '--rho-max', '1', '--replicates', '200'])
        assert result.exit_code == 0, result.output
        data = json.loads(result.output)
        assert data['d'] == 4
        assert data['bound'] > 0


class TestSimulations:
    ARGS = ['--generator', 'watts_strogatz', '--n', '40', '--k', '4', '--beta', '0.1', '--seed', '3',
            '--gamma', '0.5', '--rho-max', '0,1', '--replicates', '60']

    def test_variance_outputs_are_reproducible(self, runner, tmp_path):
        outputs = []
        for name in ('one', 'two'):
            out_dir = tmp_path / name
            result = runner.invoke(cli, ['sim-variance', *self.ARGS, '--out-dir', str(out_dir)])
            assert result.exit_code == 0, result.output
            csv_path = out_dir / 'interfere_variance_watts_strogatz_seed3.csv'
            assert (out_dir / 'interfere_variance_watts_strogatz_seed3.json').exists()
            outputs.append(csv_path.read_text())
        assert outputs[0] == outputs[1]
        assert outputs[0].splitlines()[0] == 'rho_max,gamma,sutva,expected,observed,ratio_expected,ratio_observed'

    def test_thread_count_does_not_change_results(self, runner, tmp_path):
        texts = []
        for workers in ('1', '3'):
            out_dir = tmp_path / f"w{workers}"
            args = ['--max-workers', workers, 'sim-normality', *self.ARGS, '--instances', '2',
                    '--replicates', '600', '--out-dir', str(out_dir)]
            result = runner.invoke(cli, args)
            assert result.exit_code == 0, result.output
            texts.append((out_dir / 'interfere_normality_watts_strogatz_seed3.csv').read_text())
        assert texts[0] == texts[1]

    def test_coverage_level(self, runner, tmp_path):
        result = runner.invoke(cli, ['sim-coverage', *self.ARGS, '--level', '0.9', '--out-dir', str(tmp_path)])
        assert result.exit_code == 0, result.output
        assert (tmp_path / 'interfere_coverage_watts_strogatz_seed3.csv').exists()

    def test_seed_is_required(self, runner):
        assert runner.invoke(cli, ['sim-normality', '--generator', 'erdos_renyi', '--p', '0.1']).exit_code == 2

    def test_invalid_gamma(self, runner, tmp_path):
        args = [arg if arg != '0.5' else '1.5' for arg in self.ARGS]
        result = runner.invoke(cli, ['sim-variance', *args, '--out-dir', str(tmp_path)])
        assert result.exit_code == 1
        assert "Invalid gamma" in result.output

    def test_missing_config_file(self, runner, tmp_path):
        result = runner.invoke(cli, ['--config-file', 'missing.yaml', 'sim-variance', *self.ARGS])
        assert result.exit_code == 1
        assert "Config file not found" in result.output

    def test_profile_from_config_file(self, runner, tmp_path):
        (tmp_path / 'interfere.yaml').write_text(
            "default:\n  seed: 9\nprofiles:\n  tiny:\n    variance:\n      replicates: 20\n")
        result = runner.invoke(cli, ['--profile', 'tiny', 'sim-variance', '--generator', 'erdos_renyi',
                                     '--n', '30', '--p', '0.2', '--seed', '9', '--gamma', '0.5', '--rho-max', '1',
                                     '--out-dir', str(tmp_path / 'out')])
        assert result.exit_code == 0, result.output
        data = json.loads((tmp_path / 'out' / 'interfere_variance_erdos_renyi_seed9.json').read_text())
        assert data['config']['replicates'] == 20
