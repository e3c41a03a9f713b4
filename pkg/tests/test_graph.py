import numpy as np
import pytest

from interfere.core.exceptions import GraphError, GraphFormatError, ParameterError
from interfere.core.graph import (Graph, distance_shells, gen_random_graph, graph_summary,
                                  largest_connected_component, load_edge_list, read_edge_list, write_edge_list)
from tests.conftest import path_graph


class TestEdgeList:
    def test_basic_parse(self):
        result = load_edge_list("0 1\n1 2\n")
        assert result.graph.n == 3
        assert result.graph.edges() == [(0, 1), (1, 2)]

    def test_comments_and_blank_lines(self):
        result = load_edge_list("# header\n\n0 1  # trailing\n   \n1 2\n")
        assert result.graph.num_edges == 2

    def test_duplicates_and_self_loops_are_dropped_and_counted(self):
        result = load_edge_list("0 1\n1 0\n0 1\n2 2\n")
        assert result.duplicates_dropped == 2
        assert result.self_loops_dropped == 1
        assert result.graph.num_edges == 1
        assert result.graph.n == 3
        assert result.graph.degrees.tolist() == [1, 1, 0]

    def test_ids_are_compacted_in_ascending_order(self):
        result = load_edge_list("10 20\n20 5\n")
        assert result.id_map == (5, 10, 20)
        assert result.graph.edges() == [(0, 2), (1, 2)]

    def test_wrong_token_count_reports_line(self):
        with pytest.raises(GraphFormatError) as excinfo:
            load_edge_list("0 1\n0 1 2\n")
        assert excinfo.value.line_no == 2
        assert "line 2" in str(excinfo.value)

    def test_non_integer_token(self):
        with pytest.raises(GraphFormatError):
            load_edge_list("a b\n")

    def test_empty_input(self):
        with pytest.raises(GraphFormatError):
            load_edge_list("# nothing here\n")

    def test_missing_file(self, tmp_path):
        with pytest.raises(GraphError):
            read_edge_list(str(tmp_path / 'missing.edges'))

    def test_written_list_reads_back(self, edge_file):
        graph = load_edge_list("3 7\n7 9\n9 3\n").graph
        again = read_edge_list(edge_file(write_edge_list(graph))).graph
        assert again.id_map == graph.id_map
        assert again.edges() == graph.edges()


class TestGenerators:
    @pytest.mark.parametrize('kind,params', [
        ('erdos_renyi', {'p': 0.1}),
        ('watts_strogatz', {'k': 4, 'beta': 0.2}),
        ('barabasi_albert', {'m': 2}),
    ])
    def test_same_seed_same_graph(self, kind, params):
        a = gen_random_graph(kind, 60, seed=42, **params)
        b = gen_random_graph(kind, 60, seed=42, **params)
        assert a.n == 60
        assert a.edges() == b.edges()

    def test_different_seed_changes_graph(self):
        a = gen_random_graph('erdos_renyi', 60, seed=1, p=0.1)
        b = gen_random_graph('erdos_renyi', 60, seed=2, p=0.1)
        assert a.edges() != b.edges()

    def test_unknown_kind(self):
        with pytest.raises(GraphError, match="Unknown generator"):
            gen_random_graph('lattice', 10, seed=0)

    @pytest.mark.parametrize('kind,params', [
        ('erdos_renyi', {'p': 1.5}),
        ('watts_strogatz', {'k': 3, 'beta': 0.1}),
        ('watts_strogatz', {'k': 4, 'beta': -0.1}),
        ('barabasi_albert', {'m': 10}),
    ])
    def test_invalid_parameters(self, kind, params):
        with pytest.raises(GraphError):
            gen_random_graph(kind, 10, seed=0, **params)


class TestDistanceShells:
    def test_path_shells(self, p5):
        shells = distance_shells(p5, 2)
        assert shells.shell(0, 1).tolist() == [1]
        assert shells.shell(0, 2).tolist() == [2]
        assert shells.shell(2, 2).tolist() == [0, 4]
        assert shells.sizes[1].tolist() == [1, 2, 2, 2, 1]

    def test_shells_never_hold_the_ego(self, small_er):
        shells = distance_shells(small_er, 3)
        for i in range(small_er.n):
            for rho in range(1, 4):
                assert i not in shells.shell(i, rho)

    def test_isolated_node_has_empty_shells(self):
        graph = Graph.from_edges(3, [(0, 1)])
        shells = distance_shells(graph, 2)
        assert shells.sizes[:, 2].tolist() == [0, 0, 0]

    def test_nonempty_fraction(self, p3):
        phi = distance_shells(p3, 2).nonempty_fraction
        assert phi[1] == 1.0
        assert phi[2] == pytest.approx(2 / 3)

    @pytest.mark.parametrize('seed', range(10))
    def test_shells_are_symmetric(self, seed):
        graph = gen_random_graph('erdos_renyi', 15, seed=seed, p=0.2)
        shells = distance_shells(graph, 3)
        for rho in range(1, 4):
            for i in range(graph.n):
                for j in shells.shell(i, rho):
                    assert i in shells.shell(int(j), rho)

    def test_rho_zero(self, p5):
        shells = distance_shells(p5, 0)
        assert shells.matrices == ()
        assert shells.shell(0, 1).size == 0

    def test_negative_rho(self, p5):
        with pytest.raises(ParameterError):
            distance_shells(p5, -1)


class TestSummary:
    def test_path_summary(self, p5):
        summary = graph_summary(p5)
        assert summary.nodes == 5
        assert summary.edges == 4
        assert summary.avg_degree == pytest.approx(1.6)
        assert summary.avg_pairwise_distance == pytest.approx(2.0)
        assert summary.diameter == 4
        assert not summary.distances_on_lcc

    def test_disconnected_graph_uses_largest_component(self):
        graph = Graph.from_edges(5, [(0, 1), (1, 2), (3, 4)])
        summary = graph_summary(graph)
        assert summary.distances_on_lcc
        assert summary.lcc_nodes == 3
        assert summary.nodes == 5
        assert summary.avg_pairwise_distance == pytest.approx(4 / 3)
        assert summary.diameter == 2

    def test_sampled_diameter_is_lower_bound(self):
        graph = path_graph(40)
        exact = graph_summary(graph)
        sampled = graph_summary(graph, exact_distances=False, sample_size=5, seed=3)
        assert sampled.diameter_is_lower_bound
        assert sampled.diameter <= exact.diameter

    def test_row_columns(self, p5):
        row = graph_summary(p5).as_row('p5')
        assert list(row) == ['network', 'nodes', 'edges', 'avg_degree', 'avg_pairwise_dist', 'diameter']

    def test_largest_component_tie_break(self):
        graph = load_edge_list("5 6\n1 2\n").graph
        assert largest_connected_component(graph).id_map == (1, 2)

    def test_degrees_sum_to_twice_edges(self, small_er):
        assert int(np.sum(small_er.degrees)) == 2 * small_er.num_edges
