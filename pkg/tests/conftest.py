import numpy as np
import pytest

from wellpath import PotentialSpec


@pytest.fixture
def rng():
    return np.random.default_rng(20260814)


@pytest.fixture
def double_well_1d():
    return PotentialSpec.from_strings(1, "0.5*(1 - x1^2)^2", [[-1.0], [1.0]])


@pytest.fixture
def double_well_2d():
    return PotentialSpec.from_strings(
        2, "0.5*((x1^2 - 1)^2 + x2^2)", [[-1.0, 0.0], [1.0, 0.0]]
    )


@pytest.fixture
def triple_well():
    # W = x^2 (x^2-1)^2 / 2: zeros at -1, 0, 1, and K = |x| |x^2-1|
    # integrates in closed form piece by piece.
    return PotentialSpec.from_strings(
        1, "0.5*x1^2*(x1^2 - 1)^2", [[-1.0], [0.0], [1.0]]
    )


def _random_quadratic(rng, dimension):
    terms = ["({:.3f})".format(rng.uniform(-1.0, 1.0))]
    for i in range(dimension):
        terms.append("({:.3f})*x{}".format(rng.uniform(-1.0, 1.0), i + 1))
        terms.append("({:.3f})*x{}^2".format(rng.uniform(-1.0, 1.0), i + 1))
    return " + ".join(terms)


def random_poly_spec(rng, dimension):
    """Nonnegative random polynomial: half a sum of two squared quadratics.

    The declared well is a formality (nothing here calls validate_wells);
    the zero set of such a W is wherever both quadratics vanish.
    """
    q1 = _random_quadratic(rng, dimension)
    q2 = _random_quadratic(rng, dimension)
    src = f"0.5*(({q1})^2 + ({q2})^2)"
    return PotentialSpec.from_strings(dimension, src, [[0.0] * dimension])
