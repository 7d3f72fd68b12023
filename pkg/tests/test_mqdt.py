import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mqdtft.angular import channel_space
from mqdtft.exceptions import (
    ClassificationError,
    ConfigError,
    NearResonanceError,
    PoleError,
)
from mqdtft.mqdt import (
    A_INF_FACTOR,
    ABAR_FACTOR,
    DEFAULT_CHI_M4,
    TAN8,
    DefectSet,
    KMatrixShortRange,
    build_kc,
    channel_scattering_length,
    classify_eigenchannels,
    eliminate_closed,
    partition_channels,
    scattering_length,
)

ENT13 = (1.0, -1.0, 3.0, -3.0)
ENT12 = (1.0, -1.0, 2.0, -2.0)
M3_TIE_OVERRIDE = {(1, -1.0, 2.0, -2.0): "ES"}


# -------------------------------------------------------------- classify

def test_classify_m4(pair):
    space = channel_space(pair, -4)
    tags = classify_eigenchannels(space)
    by_label = dict(zip((e.labels() for e in space.eigen), tags))
    assert by_label[(0, 0.0, 4.0, -4.0)] == "EI"
    assert by_label[(1, 0.0, 4.0, -4.0)] == "EI"
    assert by_label[(1, -1.0, 3.0, -3.0)] == "ES"
    assert by_label[(1, -1.0, 4.0, -3.0)] == "ES"


def test_classify_m5_single_channel(pair):
    space = channel_space(pair, -5)
    assert classify_eigenchannels(space) == ["EI"]


def test_classify_m3_tie_raises(pair):
    space = channel_space(pair, -3)
    with pytest.raises(ClassificationError):
        classify_eigenchannels(space)


def test_classify_m3_with_override(pair):
    space = channel_space(pair, -3)
    tags = classify_eigenchannels(space, M3_TIE_OVERRIDE)
    assert len(tags) == 8
    by_label = dict(zip((e.labels() for e in space.eigen), tags))
    # singlets are always energy insensitive
    assert by_label[(0, 0.0, 3.0, -3.0)] == "EI"
    assert by_label[(0, 0.0, 4.0, -3.0)] == "EI"
    # unambiguous dominance on the top thresholds
    assert by_label[(1, -1.0, 3.0, -2.0)] == "ES"
    assert by_label[(1, -1.0, 4.0, -2.0)] == "ES"
    assert by_label[(1, 1.0, 4.0, -4.0)] == "EI"


def test_classify_override_validation(pair):
    space = channel_space(pair, -4)
    with pytest.raises(ConfigError):
        classify_eigenchannels(space, {(0, 0.0, 4.0, -4.0): "weird"})


# -------------------------------------------------------------- build_kc

def test_kc_uniform_defects_is_scalar(pair):
    space = channel_space(pair, -4)
    k = build_kc(space.u, [0.3] * 4).matrix
    expected = math.tan(math.pi * 0.3 + math.pi / 8) * np.eye(4)
    assert np.abs(k - expected).max() < 1e-12


def test_kc_1x1_mu_zero(pair):
    space = channel_space(pair, -5)
    k = build_kc(space.u, [0.0]).matrix
    assert k[0, 0] == pytest.approx(math.tan(math.pi / 8), abs=1e-12)
    assert k[0, 0] == pytest.approx(0.414214, abs=1e-6)


def test_kc_tangent_pole(pair):
    space = channel_space(pair, -5)
    with pytest.raises(PoleError):
        build_kc(space.u, [0.375])  # pi*mu + pi/8 = pi/2


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(0.0, 0.999), min_size=4, max_size=4),
       st.integers(0, 10_000))
def test_kc_symmetry_random_orthogonal(mus, seed):
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.normal(size=(4, 4)))
    try:
        k = build_kc(q, mus).matrix
    except PoleError:
        return
    assert np.abs(k - k.T).max() <= 1e-12 * max(1.0, np.abs(k).max())


# -------------------------------------------------------------- partition

def test_partition_m4_entrance(pair):
    space = channel_space(pair, -4)
    ent = space.frag_index(*ENT13)
    open_idx, closed_idx = partition_channels(space, ent)
    assert len(open_idx) == 1 and len(closed_idx) == 3


def test_partition_lowest_threshold_m3(pair):
    space = channel_space(pair, -3)
    ent = space.frag_index(*ENT12)
    open_idx, closed_idx = partition_channels(space, ent)
    assert len(open_idx) == 1 and len(closed_idx) == 7


def test_partition_highest_threshold_all_open(pair):
    space = channel_space(pair, -4)
    ent = space.frag_index(2, -2, 3, -2)
    open_idx, closed_idx = partition_channels(space, ent)
    assert len(open_idx) == 4 and not closed_idx


# -------------------------------------------------------------- eliminate

def _kc_m4(pair, mus):
    space = channel_space(pair, -4)
    ent = space.frag_index(*ENT13)
    oi, ci = partition_channels(space, ent)
    return space, KMatrixShortRange(build_kc(space.u, mus).matrix, oi, ci)


def test_eliminate_block_decoupling(pair):
    """Uniform defects make K_oc = 0, so chi drops out entirely."""
    space, k = _kc_m4(pair, [0.21] * 4)
    k1 = eliminate_closed(k, [0.5, 1.0, -3.0])[0, 0]
    k2 = eliminate_closed(k, [5.0, -2.0, 100.0])[0, 0]
    assert k1 == pytest.approx(k2, rel=1e-12)
    assert k1 == pytest.approx(k.matrix[0, 0], rel=1e-12)


def test_eliminate_constructed_singularity(pair):
    space, k = _kc_m4(pair, [0.7253, 0.1822, 0.1822, 0.1822])
    kcc = k.matrix[np.ix_(k.closed_idx, k.closed_idx)]
    lam = np.linalg.eigvalsh(kcc)[0]
    with pytest.raises(NearResonanceError):
        eliminate_closed(k, [lam, lam, lam])


def test_eliminate_chi_to_infinity_reduces_to_koo(pair):
    space, k = _kc_m4(pair, [0.7253, 0.1822, 0.1822, 0.1984])
    k_eff = eliminate_closed(k, [1e8, 1e8, 1e8])[0, 0]
    assert k_eff == pytest.approx(k.matrix[0, 0], rel=1e-6)


def test_eliminate_shape_checks(pair):
    space, k = _kc_m4(pair, [0.1] * 4)
    with pytest.raises(ConfigError):
        eliminate_closed(k, [1.0, 2.0])


# ------------------------------------------------------ scattering length

def test_scattering_length_k_infinity(scales):
    a = scattering_length(1e12, scales)
    assert a == pytest.approx(A_INF_FACTOR * scales.beta6_a0, rel=1e-12)
    # the |K| -> oo limit is sqrt(2) times the Gribakin-Flambaum mean
    # scattering length abar = 0.4779888 beta6
    assert A_INF_FACTOR == pytest.approx(math.sqrt(2.0) * ABAR_FACTOR, rel=1e-12)
    assert ABAR_FACTOR == pytest.approx(0.4779888, abs=1e-7)


def test_scattering_length_zero_at_minus_tan8(scales):
    assert scattering_length(-TAN8, scales) == pytest.approx(0.0, abs=1e-12)


def test_scattering_length_pole(scales):
    with pytest.raises(PoleError):
        scattering_length(TAN8, scales)


def test_scattering_length_sign_flip_across_pole(scales):
    a_above = scattering_length(TAN8 + 1e-6, scales)
    a_below = scattering_length(TAN8 - 1e-6, scales)
    assert a_above > 1e6 and a_below < -1e6


def test_scattering_length_monotone_in_k(scales):
    """Strictly monotone on each side of the pole.

    da/dK = -2 tan(pi/8) C/(K - tan(pi/8))^2 < 0, so the monotone direction
    is decreasing (not increasing) on both sides.
    """
    ks_below = np.linspace(-5.0, TAN8 - 1e-3, 40)
    vals = [scattering_length(k, scales) for k in ks_below]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    ks_above = np.linspace(TAN8 + 1e-3, 5.0, 40)
    vals = [scattering_length(k, scales) for k in ks_above]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_exact_zero_energy_solution_prefactor():
    """Independent derivation of the a(K) prefactor from the exact
    zero-energy solutions sqrt(r) J_{+-1/4}(1/(2r^2)).

    With psi ~ cos(y - theta) at short range, the asymptote psi ~ B (r - a)
    gives a/beta6 = [Gamma(3/4)/(2 Gamma(5/4))] sin(theta - pi/8)/sin(theta - 3pi/8),
    which equals A_INF_FACTOR (K + tan pi/8)/(K - tan pi/8) with K = tan(theta - pi/4).
    """
    pref = math.gamma(0.75) / (2.0 * math.gamma(1.25))
    assert pref == pytest.approx(A_INF_FACTOR, rel=1e-12)
    for theta in (0.3, 1.0, 2.2, -0.7):
        lhs = pref * math.sin(theta - math.pi / 8) / math.sin(theta - 3 * math.pi / 8)
        k = math.tan(theta - math.pi / 4)
        rhs = A_INF_FACTOR * (k + TAN8) / (k - TAN8)
        assert lhs == pytest.approx(rhs, rel=1e-12)


# -------------------------------------------------- end-to-end channels

def test_table_row_m4_reference_defects(pair, scales_table):
    res = channel_scattering_length(
        pair, ENT13, DefectSet(0.7253, 0.1822), scales_table, chi_values=DEFAULT_CHI_M4
    )
    assert res.a_a0 == pytest.approx(420.2, abs=0.2)


def test_table_row_m4_alternate_triplet(pair, scales_table):
    res = channel_scattering_length(
        pair, ENT13, DefectSet(0.7253, 0.2045), scales_table, chi_values=DEFAULT_CHI_M4
    )
    assert res.a_a0 == pytest.approx(277.4, abs=0.2)


def test_table_row_m4_es_split(pair, scales_table):
    res = channel_scattering_length(
        pair, ENT13, DefectSet(0.7253, 0.1822, 0.1984), scales_table,
        chi_values=DEFAULT_CHI_M4,
    )
    assert res.a_a0 == pytest.approx(315.0, abs=0.2)


def test_uniform_defects_chi_independent_end_to_end(pair, scales):
    r1 = channel_scattering_length(
        pair, ENT13, DefectSet(0.4, 0.4), scales,
        chi_values={k: 1.0 for k in DEFAULT_CHI_M4},
    )
    r2 = channel_scattering_length(
        pair, ENT13, DefectSet(0.4, 0.4), scales,
        chi_values={k: -7.0 for k in DEFAULT_CHI_M4},
    )
    assert r1.a_a0 == pytest.approx(r2.a_a0, rel=1e-10)


def test_channel_order_invariance(pair, scales_table):
    """The pipeline result does not depend on basis ordering conventions:
    recompute K_eff from a permuted channel space by hand."""
    from mqdtft.angular import frame_transform

    space = channel_space(pair, -4)
    res = channel_scattering_length(
        pair, ENT13, DefectSet(0.7253, 0.1822, 0.1984), scales_table,
        chi_values=DEFAULT_CHI_M4,
    )
    perm = [3, 1, 0, 2]
    frag_p = [space.frag[i] for i in perm]
    u_p = frame_transform(pair, frag_p, list(space.eigen))
    mus = res.mus
    k = build_kc(u_p, mus).matrix
    ent_p = perm.index(res.entrance_index)
    thr = [c.threshold_ghz for c in frag_p]
    oi = [i for i, t in enumerate(thr) if t <= thr[ent_p]]
    ci = [i for i, t in enumerate(thr) if t > thr[ent_p]]
    chis = [DEFAULT_CHI_M4[frag_p[i].labels()] for i in ci]
    k_eff = eliminate_closed(KMatrixShortRange(k, tuple(oi), tuple(ci)), chis)[0, 0]
    assert k_eff == pytest.approx(res.k_eff, rel=1e-12)


def test_m3_requires_override_then_works(pair, scales):
    with pytest.raises(ClassificationError):
        channel_scattering_length(pair, ENT12, DefectSet(0.7253, 0.1822), scales)
    res = channel_scattering_length(
        pair, ENT12, DefectSet(0.7253, 0.1822), scales,
        class_overrides=M3_TIE_OVERRIDE,
    )
    assert 200 < res.a_a0 < 300
    assert len(res.chi_by_channel) == 7


def test_multiple_open_channels_rejected(pair, scales):
    with pytest.raises(ConfigError):
        channel_scattering_length(
            pair, (2.0, -2.0, 3.0, -2.0), DefectSet(0.7253, 0.1822), scales
        )
