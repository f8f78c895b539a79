import pytest

from conesplit._kernels import warm_up


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # Compile the jitted kernels up front so timed tests measure steady state.
    warm_up()
