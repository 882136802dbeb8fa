import pytest

import fredreg as fr


@pytest.fixture(scope="session")
def grid513():
    return fr.simpson_grid(513)


@pytest.fixture(scope="session")
def es512():
    return fr.analytic_eigensystem(512)


@pytest.fixture(scope="session")
def es64():
    return fr.analytic_eigensystem(64)


@pytest.fixture(scope="session")
def example1_seed0(es512, grid513):
    """Noisy dataset of the first reference experiment, seed 0."""
    ds, f_vals, g_coeffs = fr.synthesize_dataset(
        fr.SignalSpec.named("f1"), es512, grid513, 1e-4, 0, 512
    )
    return ds, f_vals, g_coeffs
