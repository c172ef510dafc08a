import numpy as np
import pytest

from specrad import LtiSystem

A_DEFAULT = np.array([[1.2, 0.1], [0.0, 1.0]])
B_DEFAULT = np.array([[0.0], [1.0]])


@pytest.fixture
def default_system() -> LtiSystem:
    """The shipped 2-state benchmark system (rho(A) = 1.2)."""
    return LtiSystem(A=A_DEFAULT, B=B_DEFAULT, sigma_w=0.1, sigma_u=0.1)


@pytest.fixture
def scalar_system() -> LtiSystem:
    return LtiSystem(A=np.array([[0.5]]), B=np.array([[1.0]]), sigma_w=0.1, sigma_u=0.1)
