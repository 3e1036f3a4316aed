import pytest

from nslit import EvalContext, GratingConfig, beam_from_wavelength
from nslit.constants import NEUTRON_MASS

# Reference cold-neutron beam: lambda = 5 nm, sigma = lambda, d = 10 lambda.
WAVELENGTH = 5e-9
SIGMA = 5e-9
PERIOD = 5e-8


@pytest.fixture(scope="session")
def neutron_beam():
    return beam_from_wavelength(NEUTRON_MASS, WAVELENGTH)


@pytest.fixture(scope="session")
def ctx1(neutron_beam):
    """Single-slit context (closed-form Gaussian reference)."""
    return EvalContext(neutron_beam, GratingConfig(n_slits=1, d=PERIOD, sigma=SIGMA))


@pytest.fixture(scope="session")
def ctx4(neutron_beam):
    """Four-slit reference grating."""
    return EvalContext(neutron_beam, GratingConfig(n_slits=4, d=PERIOD, sigma=SIGMA))


@pytest.fixture(scope="session")
def ctx64(neutron_beam):
    """Wide 64-slit grating for self-imaging diagnostics."""
    return EvalContext(neutron_beam, GratingConfig(n_slits=64, d=PERIOD, sigma=SIGMA))
