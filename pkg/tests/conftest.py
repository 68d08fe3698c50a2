import math

import pytest

from ptlattice import ModelSpec


def gain_chain(L: int, t: float = 1.0, g: float = 1.0) -> ModelSpec:
    """Open chain with a single imaginary gain ig at site 1."""
    return ModelSpec.from_json_dict(
        {
            "L": L,
            "boundary": "open",
            "hoppings": [{"range": 1, "re": t, "im": 0.0}],
            "flux_theta": 0.0,
            "perturbations": [{"i": 1, "j": 1, "re": 0.0, "im": g}],
        }
    )


def flux_ring(L: int, theta: float, g: float, phi: float = math.pi / 2,
              t: float = 1.0) -> ModelSpec:
    """Periodic chain with flux theta per bond and boundary potential
    g e^{i phi}|1><1| + g e^{-i phi}|L><L|."""
    return ModelSpec.from_json_dict(
        {
            "L": L,
            "boundary": "periodic",
            "hoppings": [{"range": 1, "re": t, "im": 0.0}],
            "flux_theta": theta,
            "perturbations": [
                {"i": 1, "j": 1, "re": g * math.cos(phi), "im": g * math.sin(phi)},
                {"i": L, "j": L, "re": g * math.cos(phi), "im": -g * math.sin(phi)},
            ],
        }
    )


def nnn_chain(L: int, t1: float, t2: float, g: float) -> ModelSpec:
    """Open chain with first- and second-neighbor hopping and balanced
    gain/loss ig(|1><1| - |L><L|)."""
    hoppings = [{"range": 1, "re": t1, "im": 0.0}]
    if t2 != 0:
        hoppings.append({"range": 2, "re": t2, "im": 0.0})
    return ModelSpec.from_json_dict(
        {
            "L": L,
            "boundary": "open",
            "hoppings": hoppings,
            "flux_theta": 0.0,
            "perturbations": [
                {"i": 1, "j": 1, "re": 0.0, "im": g},
                {"i": L, "j": L, "re": 0.0, "im": -g},
            ],
        }
    )


@pytest.fixture
def gain_chain_factory():
    return gain_chain


@pytest.fixture
def flux_ring_factory():
    return flux_ring


@pytest.fixture
def nnn_chain_factory():
    return nnn_chain
