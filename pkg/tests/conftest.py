import numpy as np
import pytest

from interfere.core.graph import Graph, distance_shells, gen_random_graph
from interfere.core.outcomes import DecayModel, FunctionOracle, SutvaOracle, build_decay_model


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def decay_on(graph: Graph, rho_max: int, gamma: float, alpha0=None, alpha1=None) -> DecayModel:
    alpha0 = np.zeros(graph.n) if alpha0 is None else np.asarray(alpha0, dtype=float)
    alpha1 = np.ones(graph.n) if alpha1 is None else np.asarray(alpha1, dtype=float)
    return DecayModel(shells=distance_shells(graph, rho_max), alpha0=alpha0, alpha1=alpha1, gamma=gamma)


def random_case(case: int, max_n: int = 10, min_n: int = 4):
    """Seeded small ER decay model and treatment probability for exact-enumeration checks"""
    rng = np.random.default_rng(1000 + case)
    n = int(rng.integers(min_n, max_n + 1))
    graph = gen_random_graph('erdos_renyi', n, seed=case, p=float(rng.uniform(0.2, 0.6)))
    model = build_decay_model(graph, rho_max=int(rng.integers(0, 4)), gamma=float(rng.uniform(0.1, 0.95)), seed=case)
    return model, float(rng.uniform(0.2, 0.8))


@pytest.fixture
def p3():
    return path_graph(3)


@pytest.fixture
def p5():
    return path_graph(5)


@pytest.fixture
def small_er():
    return gen_random_graph('erdos_renyi', 9, seed=11, p=0.35)


@pytest.fixture
def random_decay_model():
    graph = gen_random_graph('erdos_renyi', 10, seed=3, p=0.3)
    return build_decay_model(graph, rho_max=2, gamma=0.7, seed=5)


@pytest.fixture
def ws_graph():
    return gen_random_graph('watts_strogatz', 300, seed=1, k=6, beta=0.1)


@pytest.fixture
def sutva_oracle():
    rng = np.random.default_rng(0)
    return SutvaOracle(rng.exponential(2.0, 8), rng.exponential(1 / 0.3, 8))


@pytest.fixture
def common_influencer_oracle():
    """Unit 0's treatment shifts every outcome"""
    return FunctionOracle(6, lambda w: 1.0 + w + 3.0 * w[0])


@pytest.fixture
def edge_file(tmp_path):
    def write(text: str, name: str = 'g.edges') -> str:
        path = tmp_path / name
        path.write_text(text)
        return str(path)
    return write
