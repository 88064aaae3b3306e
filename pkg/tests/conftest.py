import math

import pytest

from dipolar_quench import Frame, PhysicsParams

R_MAX = math.sqrt(math.pi / 2)


@pytest.fixture
def ddi_final():
    """Dipolar-dominated gas at the quoted critical density, final-frame units."""
    return PhysicsParams(R=R_MAX, A=3.4454, frame=Frame.FINAL)


@pytest.fixture
def contact_final():
    return PhysicsParams(R=0.0, A=0.34454, frame=Frame.FINAL)
