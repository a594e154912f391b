import numpy as np
import pytest

from gcur import linalg


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(params=linalg.available_backends())
def backend(request):
    return request.param


def lowrank(rng, m, n, r):
    return rng.standard_normal((m, r)) @ rng.standard_normal((r, n))
