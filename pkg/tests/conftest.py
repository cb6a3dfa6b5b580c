import numpy as np
import pytest

from corpus import INCOMMENSURATE, make_corpus, metric_corpus
from qgraph.graph_core import tetrahedron
from qgraph.model import MetricGraph, equilateral


@pytest.fixture(scope="session")
def corpus():
    return make_corpus()


@pytest.fixture(scope="session")
def metric_graphs():
    return metric_corpus()


@pytest.fixture
def tet():
    return equilateral(tetrahedron())


@pytest.fixture
def tet_incommensurate():
    return MetricGraph(tetrahedron(), INCOMMENSURATE)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
