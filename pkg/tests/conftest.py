import pytest

from mqdtft.constants import default_pair, vdw_scales


@pytest.fixture(scope="session")
def pair():
    return default_pair()


@pytest.fixture(scope="session")
def scales(pair):
    """Honest scales from the bundled constants (no beta6 override)."""
    return vdw_scales(4710.0, pair.reduced_mass_u)


@pytest.fixture(scope="session")
def scales_table(pair):
    """Effective scales used for reproducing the published tables."""
    return vdw_scales(4710.0, pair.reduced_mass_u, beta6_override_a0=165.0)
