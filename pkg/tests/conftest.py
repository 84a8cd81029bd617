import numpy as np
import pytest

from stdsub.hilbert import ComplexSpace


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(params=[1, 2, 3, 5])
def space(request):
    return ComplexSpace(request.param)
