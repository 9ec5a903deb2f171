"""Pytest fixtures for carreau-poiseuille tests.

Reference fluids:
- smooth_fluid: c = 1, n = -10, alpha = 10 (flux maximum above bR/2 at b = R = 1)
- boundary_fluid: c = 1, n = -5, alpha = 3.9 (bR/2 = F(zeta1) to about 2.4e-5)
- no_solution_fluid: c = 1, n = -3, alpha = 2 (closed-form zeta1 = 3^-1/2)
- inflection_fluid: c = 0.8, n = -3, alpha = 2 (alpha*c*D = 1 - c exactly)
- two_root_fluid: c = 0.9, n = -3, alpha = 2 (zeta1 < zeta0 < zeta2)
"""
import os
import tempfile

import numpy as np
import pytest

from config_schema import EvalSettings, FlowParams, FluidParams, QuadratureSettings


@pytest.fixture
def temp_dir():
    """Create a temporary directory for test files."""
    with tempfile.TemporaryDirectory() as tmpdir:
        yield tmpdir


@pytest.fixture
def write_file(temp_dir):
    """Write text to a file under temp_dir and return its path."""
    def _write(name, text):
        path = os.path.join(temp_dir, name)
        with open(path, 'w') as f:
            f.write(text)
        return path
    return _write


@pytest.fixture
def settings():
    return EvalSettings()


@pytest.fixture
def loose_settings():
    """eq_tol wide enough for the rounded boundary-equality parameters."""
    return EvalSettings(eq_tol=1e-4)


@pytest.fixture
def quadrature():
    return QuadratureSettings()


@pytest.fixture
def unit_flow():
    return FlowParams(b=1, r=1)


@pytest.fixture
def smooth_fluid():
    return FluidParams(n=-10, alpha=10, c=1, cu=1)


@pytest.fixture
def boundary_fluid():
    return FluidParams(n=-5, alpha=3.9, c=1, cu=1)


@pytest.fixture
def no_solution_fluid():
    return FluidParams(n=-3, alpha=2, c=1, cu=1)


@pytest.fixture
def inflection_fluid():
    return FluidParams(n=-3, alpha=2, c=0.8, cu=1)


@pytest.fixture
def two_root_fluid():
    return FluidParams(n=-3, alpha=2, c=0.9, cu=1)


@pytest.fixture
def monotone_fluid():
    return FluidParams(n=-3, alpha=2, c=0.5, cu=1)


@pytest.fixture
def newtonian_fluid():
    return FluidParams(n=1, alpha=2, c=0.5, cu=1)


@pytest.fixture
def rng():
    """Seeded generator so random draws are reproducible."""
    return np.random.default_rng(12345)


@pytest.fixture
def random_fluid(rng):
    """Draw a random fluid; keyword ranges override the defaults."""
    def _draw(n=(-5.0, 2.0), alpha=(0.5, 4.0), c=(0.0, 1.0), cu=(0.2, 2.0)):
        return FluidParams(
            n=float(rng.uniform(*n)),
            alpha=float(rng.uniform(*alpha)),
            c=float(rng.uniform(*c)),
            cu=float(rng.uniform(*cu)),
        )
    return _draw
