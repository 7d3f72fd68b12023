"""Short-range K matrix, closed-channel elimination and scattering lengths.

The short-range matrix is built from eigenchannel quantum defects through
K_{ij} = sum_alpha U_{i alpha} tan(pi mu_alpha + pi/8) U_{j alpha}, closed
channels are eliminated with the long-range parameter chi per channel, and the
single-open-channel K maps to the s-wave scattering length of the -C6/R^6
potential via

    a = [2^{3/2} pi / Gamma(1/4)^2] * (K + tan(pi/8)) / (K - tan(pi/8)) * beta6.

The prefactor follows from the exact zero-energy solutions sqrt(r) J_{+-1/4};
see tests/test_mqdt.py for the derivation-based checks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .angular import ChannelSpace, channel_space
from .constants import VdwScales
from .exceptions import ClassificationError, ConfigError, NearResonanceError, PoleError

TAN8 = math.tan(math.pi / 8)

# a / beta6 in the |K| -> infinity limit, 2^{3/2} pi / Gamma(1/4)^2 = 0.67597824...
A_INF_FACTOR = 2.0 ** 1.5 * math.pi / math.gamma(0.25) ** 2

# Gribakin-Flambaum mean scattering length abar / beta6 = 0.47798880...;
# equals A_INF_FACTOR / sqrt(2) and is NOT the |K| -> infinity limit.
ABAR_FACTOR = 2.0 * math.pi / math.gamma(0.25) ** 2

EI, ES = "EI", "ES"

# Closed-channel chi for the {-1;-3} entrance (M = -4), keyed by channel
# quantum numbers (F1, mF1, F2, mF2).  Reference values for reproducing the
# published scattering-length tables without running the long-range solver.
DEFAULT_CHI_M4 = {
    (2.0, -2.0, 2.0, -2.0): -0.8155366,
    (2.0, -2.0, 3.0, -2.0): 2.5661999,
    (2.0, -1.0, 3.0, -3.0): 2.5668389,
}


@dataclass(frozen=True)
class DefectSet:
    """Eigenchannel quantum defects, stored modulo 1.

    ``mu_t_es`` defaults to the energy-insensitive triplet value, which
    disables the two-category split.
    """

    mu_s_ei: float
    mu_t_ei: float
    mu_t_es: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "mu_s_ei", self.mu_s_ei % 1.0)
        object.__setattr__(self, "mu_t_ei", self.mu_t_ei % 1.0)
        es = self.mu_t_ei if self.mu_t_es is None else self.mu_t_es % 1.0
        object.__setattr__(self, "mu_t_es", es)

    def mu_for(self, eigen, tag: str) -> float:
        if eigen.s == 0:
            return self.mu_s_ei
        return self.mu_t_es if tag == ES else self.mu_t_ei


def classify_eigenchannels(
    space: ChannelSpace, overrides: dict | None = None
) -> list[str]:
    """Assign EI/ES tags to every eigenchannel.

    Default rule: find the dominant fragmentation channel of each eigenchannel
    (largest |U| in its column).  Triplet eigenchannels dominated by one of the
    two highest-threshold channels (expanded across threshold degeneracy) are
    energy sensitive; everything else, and all singlets, energy insensitive.

    ``overrides`` maps eigenchannel labels (s, ms, i, mi) to explicit tags.
    A dominance tie that would change the tag raises ClassificationError.
    """
    overrides = overrides or {}
    thr = np.array([ch.threshold_ghz for ch in space.frag])
    if space.size >= 2:
        cutoff = np.sort(thr)[-2]
    else:
        cutoff = np.inf
    tags = []
    for a, eigen in enumerate(space.eigen):
        key = eigen.labels()
        if key in overrides:
            tag = overrides[key]
            if tag not in (EI, ES):
                raise ConfigError(f"override for {eigen} must be 'EI' or 'ES'")
            tags.append(tag)
            continue
        col = np.abs(space.u[:, a])
        i_star = int(np.argmax(col))
        candidates = np.nonzero(col >= col[i_star] - 1e-9)[0]
        cand_tags = {
            ES if (eigen.s == 1 and thr[i] >= cutoff) else EI for i in candidates
        }
        if len(cand_tags) > 1:
            raise ClassificationError(
                f"dominance tie for eigenchannel {eigen}: channels "
                f"{[str(space.frag[i]) for i in candidates]} give conflicting "
                f"classes; set an explicit override"
            )
        tags.append(cand_tags.pop())
    return tags


@dataclass(frozen=True)
class KMatrixShortRange:
    """Symmetric short-range K matrix in the fragmentation basis."""

    matrix: np.ndarray
    open_idx: tuple[int, ...] = ()
    closed_idx: tuple[int, ...] = ()


def build_kc(u: np.ndarray, mus) -> KMatrixShortRange:
    """K_{ij} = sum_alpha U_{i alpha} tan(pi mu_alpha + pi/8) U_{j alpha}."""
    mus = np.asarray(mus, dtype=float)
    if u.shape[1] != mus.size:
        raise ConfigError("one quantum defect required per eigenchannel")
    args = np.pi * mus + np.pi / 8
    # tangent pole at pi/2 (mod pi)
    dist = np.abs((args - np.pi / 2) % np.pi)
    dist = np.minimum(dist, np.pi - dist)
    if np.any(dist < 1e-9):
        bad = mus[dist < 1e-9]
        raise PoleError(f"tan(pi mu + pi/8) pole for mu = {bad}")
    k = (u * np.tan(args)) @ u.T
    return KMatrixShortRange(matrix=0.5 * (k + k.T))


def partition_channels(space: ChannelSpace, entrance: int):
    """Open/closed index sets for a collision entering at channel ``entrance``
    with zero collision energy: open means threshold <= entrance threshold."""
    if not 0 <= entrance < space.size:
        raise ConfigError(f"entrance index {entrance} outside channel space")
    e_thr = space.frag[entrance].threshold_ghz
    open_idx = tuple(i for i, ch in enumerate(space.frag) if ch.threshold_ghz <= e_thr)
    closed_idx = tuple(i for i, ch in enumerate(space.frag) if ch.threshold_ghz > e_thr)
    return open_idx, closed_idx


def eliminate_closed(k: KMatrixShortRange, chi_values) -> np.ndarray:
    """K_eff = K_oo + K_oc (chi - K_cc)^{-1} K_co with chi diagonal.

    Raises NearResonanceError when (chi - K_cc) is numerically singular
    (condition number above 1e12).
    """
    m = k.matrix
    oi, ci = list(k.open_idx), list(k.closed_idx)
    if not oi:
        raise ConfigError("no open channels")
    koo = m[np.ix_(oi, oi)]
    if not ci:
        return koo
    chi = np.asarray(chi_values, dtype=float)
    if chi.size != len(ci):
        raise ConfigError(f"{len(ci)} closed channels but {chi.size} chi values")
    a = np.diag(chi) - m[np.ix_(ci, ci)]
    cond = np.linalg.cond(a)
    if not np.isfinite(cond) or cond > 1e12:
        eig = np.linalg.eigvalsh(0.5 * (a + a.T))
        worst = eig[np.argmin(np.abs(eig))]
        raise NearResonanceError(
            f"(chi - K_cc) is near singular: condition {cond:.3e}, "
            f"smallest eigenvalue {worst:.3e}"
        )
    return koo + m[np.ix_(oi, ci)] @ np.linalg.solve(a, m[np.ix_(ci, oi)])


def scattering_length(k_eff: float, scales: VdwScales) -> float:
    """s-wave scattering length in Bohr radii from the effective K."""
    if abs(k_eff) > 1e10:
        return A_INF_FACTOR * scales.beta6_a0
    if abs(k_eff - TAN8) <= 1e-12:
        raise PoleError("K at tan(pi/8): scattering length divergent (resonance)")
    return A_INF_FACTOR * (k_eff + TAN8) / (k_eff - TAN8) * scales.beta6_a0


@dataclass(frozen=True)
class ChannelResult:
    """End-to-end result for one entrance channel."""

    space: ChannelSpace
    entrance_index: int
    tags: tuple[str, ...]
    mus: tuple[float, ...]
    chi_by_channel: dict
    k_eff: float
    a_a0: float


def channel_scattering_length(
    pair,
    entrance,
    defects: DefectSet,
    scales: VdwScales,
    chi_values: dict | None = None,
    class_overrides: dict | None = None,
    chi_phase: float | None = None,
) -> ChannelResult:
    """Full pipeline: enumerate, frame transform, classify, build K, eliminate
    closed channels, convert to a scattering length.

    ``entrance`` is (F1, mF1, F2, mF2).  ``chi_values`` maps closed-channel
    labels to configured chi; channels not listed fall back to the numerical
    long-range solver at the channel's threshold gap (``chi_phase`` overrides
    the calibrated phase constant there).
    """
    from .constants import vdw_scales
    from .longrange import chi_c, scaled_energy  # local import, avoids cycle

    # The calibrated chi phase constant is tied to the mass/C6-derived energy
    # scale; a beta6 override must only rescale the output length, not shift
    # the gap -> scaled-energy conversion underneath the calibration.
    chi_scales = vdw_scales(scales.c6_au, scales.reduced_mass_u)

    f1, mf1, f2, mf2 = entrance
    space = channel_space(pair, mf1 + mf2)
    ent = space.frag_index(f1, mf1, f2, mf2)
    tags = classify_eigenchannels(space, class_overrides)
    mus = tuple(defects.mu_for(e, t) for e, t in zip(space.eigen, tags))
    open_idx, closed_idx = partition_channels(space, ent)
    if len(open_idx) != 1:
        raise ConfigError(
            f"scattering length needs exactly one open channel, got {len(open_idx)}"
        )
    kc = KMatrixShortRange(build_kc(space.u, mus).matrix, open_idx, closed_idx)

    chi_values = dict(chi_values or {})
    e_thr = space.frag[ent].threshold_ghz
    chis = []
    chi_used = {}
    for i in closed_idx:
        ch = space.frag[i]
        key = ch.labels()
        if key in chi_values:
            val = float(chi_values[key])
        else:
            gap_ghz = ch.threshold_ghz - e_thr
            eps = scaled_energy(gap_ghz, chi_scales)
            val = chi_c(eps, chi_scales, phase=chi_phase).chi
        chis.append(val)
        chi_used[key] = val

    k_eff = float(eliminate_closed(kc, chis)[0, 0])
    a = scattering_length(k_eff, scales)
    return ChannelResult(
        space=space,
        entrance_index=ent,
        tags=tuple(tags),
        mus=mus,
        chi_by_channel=chi_used,
        k_eff=k_eff,
        a_a0=a,
    )
