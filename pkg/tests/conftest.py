import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from orrw import build_graph  # noqa: E402


@pytest.fixture
def star3():
    return build_graph([(0, 1), (0, 2)], 0)


@pytest.fixture
def path3():
    return build_graph([(0, 1), (1, 2)], 0)


@pytest.fixture
def path4():
    return build_graph([(0, 1), (1, 2), (2, 3)], 1)


@pytest.fixture
def triangle():
    return build_graph([(1, 2), (2, 3), (3, 1)], 1)
