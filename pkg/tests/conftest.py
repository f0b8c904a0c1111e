import numpy as np
import pytest

from twoholonomy.connection import LocalConnection, gauge_transform, random_gauge_pair
from twoholonomy.geometry import SphereCover
from twoholonomy.liegroups import PAULI, IdentityCovering, UnitaryGroup
from twoholonomy.monopoles import make_config


def constant_connection(at, ap, group=None):
    """``A = at d theta + ap d phi`` in both charts with trivial transition."""
    group = group if group is not None else UnitaryGroup(2, special=True)
    at, ap = np.asarray(at, complex), np.asarray(ap, complex)

    def a(theta, phi):
        shape = np.broadcast_shapes(np.shape(theta), np.shape(phi)) + at.shape
        return np.broadcast_to(at, shape), np.broadcast_to(ap, shape)

    def g(theta, phi):
        return group.identity(np.broadcast_shapes(np.shape(theta), np.shape(phi)))

    return LocalConnection(IdentityCovering(group), {"N": a, "S": a}, None, g, SphereCover(), "constant")


@pytest.fixture
def l_path_connection():
    return constant_connection(1j * PAULI[0], 1j * PAULI[1])


@pytest.fixture(scope="session")
def gauged_so3():
    """The SO3 monopole after a fixed smooth random gauge transform."""
    config = make_config("SO3")
    rng = np.random.default_rng(11)
    return config, gauge_transform(config.connection, random_gauge_pair(config.covering.base, rng, scale=0.4))
