import numpy as np
import pytest

from darboux_forge.curve_ribaucour import curve_from_spec
from darboux_forge.darboux_factory import darboux_partner
from darboux_forge.hypersurface import InversionSpec, get_surface, invert_surface

# one pair per family, built once; every input is O(1) and admissible
PAIR_INPUTS = {
    "cylinder": ("circle:R=1", 2.0),
    "cone": ("sphere_circle:d=0.5", 2.0),
    "rotation": ("hyperbolic_circle:r=1", 0.5),
}
H0 = (1.0, 1.0, 1.0)


def _build(family):
    curve_spec, big_a = PAIR_INPUTS[family]
    return darboux_partner(family, curve_from_spec(curve_spec), big_a, H0)


@pytest.fixture(scope="session")
def cylinder_pair():
    return _build("cylinder")


@pytest.fixture(scope="session")
def cone_pair():
    return _build("cone")


@pytest.fixture(scope="session")
def rotation_pair():
    return _build("rotation")


@pytest.fixture(scope="session")
def all_pairs(cylinder_pair, cone_pair, rotation_pair):
    return {"cylinder": cylinder_pair, "cone": cone_pair,
            "rotation": rotation_pair}


class TwoSurfaces:
    """Duck-typed stand-in for a pair when a check only needs f and f_tilde."""

    def __init__(self, f, f_tilde):
        self.f = f
        self.f_tilde = f_tilde


@pytest.fixture(scope="session")
def inversion_control():
    """A surface and its image under a sphere inversion: conformally
    congruent by construction, so every nontriviality witness must reject it."""
    sphere = get_surface("sphere")
    spec = InversionSpec(np.array([0.0, 0.0, 3.0]), 2.0)
    return TwoSurfaces(sphere, invert_surface(spec, sphere))
