import numpy as np
import pytest
from hypothesis import settings

from resolab.potential import (
    Bump,
    GridPotential,
    PiecewisePoly,
    SquareWell,
    StepPotential,
)

settings.register_profile("resolab", max_examples=25, deadline=None)
settings.load_profile("resolab")


def asymmetric_zoo():
    """Asymmetric fixtures with dyadic breakpoints (exact under reflection)."""
    return [
        StepPotential(edges=(0.0, 0.5, 1.0), levels=(1.0, 3.0)),
        StepPotential(edges=(0.0, 0.25, 0.625, 1.0), levels=(2.0, -1.0, 0.5)),
        Bump(1, 2, 6.0),
        PiecewisePoly(edges=(0.0, 0.5, 1.0), coefficients=((1.0, 2.0), (-0.5,))),
        GridPotential(samples=(0.0, 1.5, 0.25, 2.0, 0.75), interpolation=1),
    ]


def full_zoo():
    return [
        SquareWell(2.0),
        SquareWell(-2.0),
        SquareWell(0.0),
        Bump(1, 1, 6.0),
        GridPotential(samples=(0.5, -0.25, 1.0, 0.75, 0.2, 0.9, -0.4, 0.1, 0.6), interpolation=3),
    ] + asymmetric_zoo()


@pytest.fixture(scope="session")
def zoo():
    return full_zoo()


@pytest.fixture(scope="session")
def asym_zoo():
    return asymmetric_zoo()


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240811)
