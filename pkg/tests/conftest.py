import numpy as np
import pytest

from floqamp import _accel
from floqamp.model import ModelParams, scaled_params, transient_params

BACKENDS = ["numpy"] + (["numba"] if _accel.HAVE_NUMBA else [])


@pytest.fixture(params=BACKENDS)
def backend(request):
    prev = _accel.set_backend(request.param)
    yield request.param
    _accel.set_backend(prev)


@pytest.fixture
def s1_params():
    return transient_params()


@pytest.fixture
def near_critical_params():
    # beta = 0.95 at s = 3
    return scaled_params(19.5, 3.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_params(rng, phi=np.pi / 2):
    return ModelParams(
        eta_omega=float(rng.uniform(1, 10)),
        eta_kappa=float(rng.uniform(1, 20)),
        eta_gamma=float(rng.uniform(0.5, 10)),
        eta_p=float(rng.uniform(0, 10)),
        phi=phi,
    )
