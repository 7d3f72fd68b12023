import math

import numpy as np
import pytest

from mqdtft.exceptions import AccuracyError, ConfigError
from mqdtft.longrange import (
    CHI_PHASE_CALIBRATED,
    ScaledEnergy,
    calibrate_phase,
    chi_c,
    scaled_energy,
)

# reference chi values for the closed channels of the {-1;-3} entrance;
# the 3.7990 GHz value fixes the calibration of the phase constant, the two
# 6.8347 GHz values are pure validation
CHI_CAL_GAP_GHZ = 3.798950171904290      # D87 - D85
CHI_CAL = -0.8155366
CHI_VAL_GAP_GHZ = 6.834682610904290      # D87
CHI_VAL = (2.5661999, 2.5668389)


@pytest.fixture(scope="module")
def eps_cal(scales):
    return scaled_energy(CHI_CAL_GAP_GHZ, scales)


def test_scaled_energy_zero_gap(scales):
    assert scaled_energy(0.0, scales).value == 0.0
    with pytest.raises(ConfigError):
        ScaledEnergy(+1.0)
    with pytest.raises(ConfigError):
        chi_c(scaled_energy(0.0, scales))  # at-threshold: solver rejects


def test_scaled_energy_values(scales, eps_cal):
    # gap/(s_E/h): order 1e3, ~-2.5e3 for 3.7990 GHz and ~-4.4e3 for 6.8347 GHz
    assert eps_cal.value == pytest.approx(-2455.2, abs=2.0)
    eps2 = scaled_energy(CHI_VAL_GAP_GHZ, scales)
    assert eps2.value == pytest.approx(-4417.2, abs=3.0)


def test_scaled_energy_rejects_negative_gap(scales):
    with pytest.raises(ConfigError):
        scaled_energy(-1.0, scales)


def test_chi_rejects_positive_energy():
    with pytest.raises(ConfigError):
        chi_c(+10.0)


def test_calibration_point(scales, eps_cal):
    res = chi_c(eps_cal, scales)
    assert res.chi == pytest.approx(CHI_CAL, abs=2e-6)


def test_validation_point_two_percent(scales):
    """Single calibrated constant reproduces the independent references."""
    res = chi_c(scaled_energy(CHI_VAL_GAP_GHZ, scales), scales)
    for ref in CHI_VAL:
        assert abs(res.chi - ref) / abs(ref) < 0.02


def test_phase_is_near_quarter_pi():
    # the calibrated convention is numerically a plain quadrature pair
    assert abs(CHI_PHASE_CALIBRATED - math.pi / 4) < 5e-4


def test_calibrate_phase_roundtrip(scales, eps_cal):
    phase = calibrate_phase(eps_cal, CHI_CAL)
    assert phase == pytest.approx(CHI_PHASE_CALIBRATED, abs=5e-7)


def test_wronskian_drift(scales, eps_cal):
    res = chi_c(eps_cal, scales)
    assert res.wronskian_drift < 1e-8


def test_matching_radius_independence(scales, eps_cal):
    r1 = chi_c(eps_cal, scales, pot_suppress=1e6)
    r2 = chi_c(eps_cal, scales, pot_suppress=3e6)  # radius shift ~20%
    assert abs(r1.chi - r2.chi) / max(1.0, abs(r2.chi)) < 1e-6


def test_inner_radius_independence(scales, eps_cal):
    vals = [chi_c(eps_cal, scales, r0=r0).chi for r0 in (0.02, 0.035, 0.0495)]
    spread = (max(vals) - min(vals)) / abs(vals[0])
    assert spread < 1e-6


def test_grid_halving(scales, eps_cal):
    r1 = chi_c(eps_cal, scales)
    r2 = chi_c(eps_cal, scales, density=640.0)
    assert abs(r2.chi - r1.chi) / abs(r2.chi) < 1e-8


def test_continuity_in_energy(scales, eps_cal):
    """chi at eps and 1.001 eps agree within 0.5% away from poles (the local
    slope is the dense-grid oracle here: both points sit on the same smooth
    branch)."""
    e1 = eps_cal.value
    c1 = chi_c(e1).chi
    c2 = chi_c(1.001 * e1).chi
    assert abs(c2 - c1) / max(1.0, abs(c1)) < 0.005


def test_reference_pair_diagnostics(scales, eps_cal):
    res = chi_c(eps_cal, scales, keep_pair=True)
    pair_ = res.pair
    assert pair_ is not None
    assert pair_.r[0] < pair_.r[-1]
    assert np.all(np.diff(pair_.r) > 0)
    assert pair_.wronskian_drift < 1e-8
    # f - chi * g must be decaying at large r: compare growth over the last decade
    tail = pair_.f - res.chi * pair_.g
    n = len(pair_.r)
    i1, i2 = int(0.8 * n), n - 1
    assert abs(tail[i2]) < abs(tail[i1])
    # while f and g individually explode
    assert abs(pair_.f[i2]) > abs(pair_.f[i1])


def test_dop853_cross_check(scales, eps_cal):
    """Independent integrator route: propagate the same standardized pair
    with scipy's DOP853 and extract chi the same way."""
    from scipy.integrate import solve_ivp

    from mqdtft.longrange import _init_pair

    e = eps_cal.value
    kappa = math.sqrt(-e)
    r0 = 0.03
    rm = (1e6 / -e) ** (1.0 / 6.0)
    y = np.array(_init_pair(r0, e, CHI_PHASE_CALIBRATED))

    def rhs(r, y):
        q = e + r ** -6
        return [y[1], -q * y[0], y[3], -q * y[2]]

    for a, b in zip(np.linspace(r0, rm, 25)[:-1], np.linspace(r0, rm, 25)[1:]):
        sol = solve_ivp(rhs, (a, b), y, method="DOP853", rtol=1e-12, atol=0.0)
        y = sol.y[:, -1]
        m = np.abs(y).max()
        if m > 1e100:
            y /= m
    chi_dop = (y[1] + kappa * y[0]) / (y[3] + kappa * y[2])
    res = chi_c(eps_cal, scales)
    assert res.chi == pytest.approx(chi_dop, rel=1e-7)


def test_supported_energy_range_guard():
    with pytest.raises(ConfigError):
        chi_c(-1e-5)
    with pytest.raises(ConfigError):
        chi_c(-1e7)


def test_matching_drift_reported(scales, eps_cal):
    res = chi_c(eps_cal, scales)
    assert res.matching_drift < 1e-6
    assert res.n_points > 1000
