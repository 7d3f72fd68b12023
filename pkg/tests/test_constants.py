import math

import pytest

from mqdtft.constants import (
    Species,
    hyperfine_threshold,
    load_species,
    reduced_mass,
    vdw_scales,
)
from mqdtft.exceptions import ConfigError

# oracle value: m87*m85/(m87+m85) with the bundled AME2020 masses
REDUCED_MASS_U = 86.90918053 * 84.91178974 / (86.90918053 + 84.91178974)


def test_species_manifolds(pair):
    assert pair.a.lower_f == 1 and pair.a.upper_f == 2
    assert pair.b.lower_f == 2 and pair.b.upper_f == 3


def test_reduced_mass_value(pair):
    assert reduced_mass(pair.a, pair.b) == pytest.approx(REDUCED_MASS_U, rel=1e-12)
    assert REDUCED_MASS_U == pytest.approx(42.9494, abs=1e-4)


def test_reduced_mass_equal_masses():
    a = Species("X", 10.0, 1.5, 1.0)
    b = Species("Y", 10.0, 1.5, 1.0)
    assert reduced_mass(a, b) == pytest.approx(5.0, rel=1e-14)


def test_reduced_mass_heavy_partner_limit(pair):
    """mu -> lighter mass monotonically as the partner mass grows."""
    light = Species("L", 5.0, 1.5, 1.0)
    prev = 0.0
    for m in (10.0, 100.0, 1e4, 1e8):
        heavy = Species("H", m, 1.5, 1.0)
        mu = reduced_mass(light, heavy)
        assert prev < mu < 5.0
        prev = mu
    assert prev == pytest.approx(5.0, rel=1e-7)


def test_beta6_value(scales):
    # published value 165.1 a0 for C6 = 4710 a.u., tolerance 0.5%
    assert abs(scales.beta6_a0 - 165.1) / 165.1 < 0.005


def test_beta6_self_consistency(scales):
    assert scales.scaled_c6_au() == pytest.approx(4710.0, rel=1e-10)


def test_energy_scale_mhz(scales):
    # direct evaluation of hbar^2/(2 mu beta6^2)/h gives ~1.5 MHz
    assert 1.0 < scales.energy_scale_MHz < 2.0
    assert scales.energy_scale_MHz == pytest.approx(1.5473, abs=2e-3)


def test_vdw_scaling_homogeneity(pair):
    """c6 -> 16 c6 scales beta6 by 2 and s_E by 1/4, exactly."""
    s1 = vdw_scales(4710.0, pair.reduced_mass_u)
    s2 = vdw_scales(16 * 4710.0, pair.reduced_mass_u)
    assert s2.beta6_a0 == pytest.approx(2.0 * s1.beta6_a0, rel=1e-12)
    assert s2.energy_scale_J == pytest.approx(s1.energy_scale_J / 4.0, rel=1e-12)


def test_vdw_rejects_nonpositive(pair):
    with pytest.raises(ConfigError):
        vdw_scales(-1.0, pair.reduced_mass_u)
    with pytest.raises(ConfigError):
        vdw_scales(4710.0, 0.0)


def test_beta6_override(pair):
    s = vdw_scales(4710.0, pair.reduced_mass_u, beta6_override_a0=165.0)
    assert s.beta6_a0 == 165.0


def test_thresholds(pair):
    d87 = pair.a.hyperfine_splitting_ghz
    d85 = pair.b.hyperfine_splitting_ghz
    assert hyperfine_threshold(pair, 1, 2) == 0.0
    assert hyperfine_threshold(pair, 1, 3) == pytest.approx(d85, rel=1e-12)
    assert d85 == pytest.approx(3.0357, abs=1e-4)
    assert hyperfine_threshold(pair, 2, 3) == pytest.approx(d87 + d85, rel=1e-12)
    assert d87 + d85 == pytest.approx(9.8704, abs=1e-4)


def test_threshold_values_and_monotonicity(pair):
    """Exactly four distinct values, ordered by upper-manifold membership."""
    vals = sorted(
        hyperfine_threshold(pair, f1, f2)
        for f1 in (pair.a.lower_f, pair.a.upper_f)
        for f2 in (pair.b.lower_f, pair.b.upper_f)
    )
    assert len(set(vals)) == 4
    assert vals[0] == 0.0
    # one upper-manifold member raises the threshold, two raise it further
    assert vals[1] < vals[2] < vals[3]
    assert vals[3] == pytest.approx(vals[1] + vals[2], rel=1e-12)


def test_unknown_species():
    with pytest.raises(ConfigError):
        load_species("Cs133")


def test_threshold_rejects_bad_manifold(pair):
    with pytest.raises(ConfigError):
        hyperfine_threshold(pair, 3, 2)
