import pytest

from hypframe import CurvatureQuartet, integrate_frame


@pytest.fixture(scope="session")
def model_ce_h():
    """Constant quartet (1, 1, 2, 0): sigma_F = 12, hyperbolic side defined."""
    q = CurvatureQuartet.from_strings("1", "1", "2", "0")
    return integrate_frame(q, (0.0, 4.0, 401), step=1e-3)


@pytest.fixture(scope="session")
def model_ce_d():
    """Constant quartet (2, 1, 1, 0): sigma_F = -3, de Sitter side defined."""
    q = CurvatureQuartet.from_strings("2", "1", "1", "0")
    return integrate_frame(q, (0.0, 4.0, 401), step=1e-3)


@pytest.fixture(scope="session")
def model_ce_d_short():
    q = CurvatureQuartet.from_strings("2", "1", "1", "0")
    return integrate_frame(q, (0.0, 2.0, 201), step=1e-3)


@pytest.fixture(scope="session")
def model_ce_h_dense():
    """Densely stored samples: finite differences of the dense output stay
    below interpolation noise for the determinant oracles."""
    q = CurvatureQuartet.from_strings("1", "1", "2", "0")
    return integrate_frame(q, (0.0, 2.0, 4001), step=1e-3)


@pytest.fixture(scope="session")
def model_ce_d_dense():
    q = CurvatureQuartet.from_strings("2", "1", "1", "0")
    return integrate_frame(q, (0.0, 2.0, 4001), step=1e-3)


@pytest.fixture(scope="session")
def model_sw():
    """Swept quartet (t/2, 1, 2, 0): epsilon changes sign at t = 0."""
    q = CurvatureQuartet.from_strings("0.5*t", "1", "2", "0")
    return integrate_frame(q, (-1.5, 1.5, 301), step=1e-3)


@pytest.fixture(scope="session")
def model_sw_d():
    """De Sitter sweep (2 + t/2, 0.7 t, 1, 0): epsilon^d crossing inside."""
    q = CurvatureQuartet.from_strings("2+0.5*t", "0.7*t", "1", "0")
    return integrate_frame(q, (0.05, 2.0, 196), step=1e-3)


@pytest.fixture(scope="session")
def model_sigma_sign():
    """Quartet (t, 1, 2, 0): sigma_F = 12 - 4 t^2 changes sign at +-sqrt(3)."""
    q = CurvatureQuartet.from_strings("t", "1", "2", "0")
    return integrate_frame(q, (-1.93, 1.93, 387), step=1e-3)
