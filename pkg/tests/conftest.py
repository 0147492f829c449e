import numpy as np
import pytest

from epdyn.models.diamond import DiamondRingParams, build_diamond
from epdyn.models.stub import StubRibbonParams, build_stub


@pytest.fixture
def rng():
    return np.random.default_rng(20260825)


def random_complex(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def stub4(lam, profile="2J"):
    if profile == "2J":
        ups = (2.0, 2.0, 2.0, 2.0)
    elif profile == "sqrt":
        ups = tuple(float(np.sqrt(n)) for n in (1, 2, 3, 4))
    else:
        raise ValueError(profile)
    return StubRibbonParams(N=4, up_hoppings=ups, lam=lam)


def diamond(eps_value, kappa, imaginary=False):
    return DiamondRingParams(
        eps_value=eps_value, kappa=kappa, eps_is_imaginary=imaginary
    )


def scenario_params():
    """The ten in-scope EP scenarios: stub lambda=0 with both hopping
    profiles plus the eight diamond table parameter points."""
    out = [
        ("stub-2J", stub4(0.0, "2J")),
        ("stub-sqrt", stub4(0.0, "sqrt")),
        ("ep3-k+1", diamond(2.0, 1.0)),
        ("ep3-k-1", diamond(2.0, -1.0)),
        ("ep3-e+i", diamond(1.0, 0.5, imaginary=True)),
        ("ep3-e-i", diamond(-1.0, 0.5, imaginary=True)),
        ("double-e+i-k+1", diamond(1.0, 1.0, imaginary=True)),
        ("double-e+i-k-1", diamond(1.0, -1.0, imaginary=True)),
        ("double-e-i-k+1", diamond(-1.0, 1.0, imaginary=True)),
        ("double-e-i-k-1", diamond(-1.0, -1.0, imaginary=True)),
    ]
    return out


def scenario_matrix(params):
    if isinstance(params, StubRibbonParams):
        return build_stub(params)
    return build_diamond(params)
