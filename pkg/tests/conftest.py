import numpy as np
import pytest

from sepconv.stabilizer import Graph, graph_state, ring_stabilizer_generators
from sepconv.tensor import PureState


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def ring5():
    return graph_state(Graph.ring(5))


@pytest.fixture(scope="session")
def ring3():
    return graph_state(Graph.ring(3))


@pytest.fixture(scope="session")
def ring5_gens():
    return ring_stabilizer_generators(5)


@pytest.fixture(scope="session")
def ghz3():
    amps = np.zeros(8)
    amps[0] = amps[7] = 1 / np.sqrt(2)
    return PureState((2, 2, 2), amps)
