import os
import tempfile

# keep the rotating log file out of the user's home during tests
os.environ.setdefault("GIBBSWAVE_CONFIG_DIR", tempfile.mkdtemp(prefix="gibbswave-tests-"))

import numpy as np
import pytest

from gibbswave.dynamics.flow import FlowParams
from gibbswave.measures.gibbs import sample_gaussian, sample_gaussian_batch
from gibbswave.spectral.quadrature import QuadratureKind, RadialQuadrature


@pytest.fixture(autouse=True)
def isolated_dirs(tmp_path, monkeypatch):
    """Every test writes run directories under its own tmp_path."""
    out = tmp_path / "runs"
    monkeypatch.setenv("GIBBSWAVE_OUTPUT_DIR", str(out))
    return out


@pytest.fixture
def quad8():
    return RadialQuadrature.for_modes(8)


@pytest.fixture
def quad16():
    return RadialQuadrature.for_modes(16)


@pytest.fixture(params=[QuadratureKind.UNIFORM_SINE, QuadratureKind.GAUSS_LEGENDRE], ids=lambda k: k.value)
def quad_kind(request):
    return request.param


@pytest.fixture
def flow8(quad8):
    return FlowParams(alpha=1.0, n_modes=8, dt=1e-3, quad=quad8)


@pytest.fixture
def mu_sample():
    """One mu_N draw with N = 8."""
    return sample_gaussian(8, 2024, 0)


@pytest.fixture
def mu_batch():
    """Twelve mu_N draws with N = 8, as a (12, 8) array."""
    return np.array(sample_gaussian_batch(8, 2024, range(12)).coeffs)
