import pytest

from occseg.calibration import DEFAULT_SPLIT_C1, calibrate


@pytest.fixture(scope="session")
def calibrated():
    """Benchmark parameters in folded (product) form, alpha = 1/2."""
    return calibrate()


@pytest.fixture(scope="session")
def split_params():
    """Benchmark parameters with the explicit probability split (c1 = 25)."""
    return calibrate(c1=DEFAULT_SPLIT_C1)
