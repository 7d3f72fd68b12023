"""Negative-energy long-range parameter chi(E) for the -C6/R^6 potential.

Everything is dimensionless: lengths in beta6, energies in s_E.  The s-wave
radial equation psi'' + (eps + r^-6) psi = 0 is propagated outward for a
standardized solution pair (f, g),

    f ~ k(r)^{-1/2} sin(y(r) - D(r) + phase),
    g ~ k(r)^{-1/2} cos(y(r) - D(r) + phase),      r -> 0,

where y = 1/(2 r^2) is the zero-energy WKB phase (the argument of the exact
zero-energy solutions sqrt(r) J_{+-1/4}(y)) and D(r) = int_0^r (k - k0) dr'
carries the energy dependence of the short-range phase.  The pair is realized
at the inner grid edge from the exact Bessel solutions with first-order
energy corrections, so the standardization is independent of where the grid
starts (tested down to 1e-6 in chi for r0 < 0.05).

chi is the growing-coefficient ratio at large r: the combination f - chi*g is
purely decaying.  The additive ``phase`` constant fixes the convention; the
calibrated default reproduces the reference value -0.8155366 at the scaled
energy of the 3.7990 GHz channel gap and is numerically pi/4 + 1.3e-4, i.e.
the published values correspond (to calibration accuracy) to a plain
quadrature pair in this standardization.

Propagation is Numerov with a log grid in the potential-dominated region and
a linear grid through the turning point out to the matching radius, with grid
densities set in points per radian of local WKB phase.  The Numerov recurrence
is solved as a lower-banded triangular system (vectorized forward
substitution).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded
from scipy.special import jv

from .constants import H_PLANCK, VdwScales
from .exceptions import AccuracyError, ConfigError

# Global additive phase constant of the (f, g) standardization, calibrated
# once so that chi at the scaled energy of the 3.7990 GHz gap (Rb87-Rb85,
# C6 = 4710 a.u.) equals -0.8155366.  See tools/calibrate_chi_phase.py.
CHI_PHASE_CALIBRATED = 0.7855231518

_EPS_MIN = -1.0e5   # guard for the rescaled propagation
_EPS_MAX = -1.0e-3  # matching radius grows like |eps|^{-1/6}


@dataclass(frozen=True)
class ScaledEnergy:
    """Dimensionless channel energy E/s_E with provenance.

    Closed channels have value < 0; the boundary value 0 (a channel exactly
    at threshold) is representable but rejected by the solver.
    """

    value: float
    source_gap_ghz: float | None = None

    def __post_init__(self):
        if self.value > 0:
            raise ConfigError("scaled channel energy must be <= 0")


def scaled_energy(gap_ghz: float, scales: VdwScales) -> ScaledEnergy:
    """Scaled energy of a channel lying ``gap_ghz`` above the entrance."""
    if gap_ghz < 0:
        raise ConfigError("threshold gap must be non-negative")
    s_e_hz = scales.energy_scale_J / H_PLANCK
    return ScaledEnergy(value=-gap_ghz * 1e9 / s_e_hz, source_gap_ghz=gap_ghz)


@dataclass(frozen=True)
class ReferencePair:
    """Propagated standardized pair on the outer (linear) grid section."""

    r: np.ndarray
    f: np.ndarray
    g: np.ndarray
    wronskian: float
    wronskian_drift: float


@dataclass(frozen=True)
class ChiResult:
    chi: float
    chi_inner: float          # value at the inner matching radius
    matching_drift: float     # |chi - chi_inner| / max(1, |chi|)
    wronskian_drift: float
    eps: float
    phase: float
    n_points: int
    pair: ReferencePair | None = None


def _init_pair(r0: float, eps: float, phase: float):
    """(f, f', g, g') at r0 from the exact zero-energy Bessel pair.

    First-order energy corrections: the phase shift D = int_0^r0 (k - k0) dr
    (series in eps*r0^6, which must be small) and the WKB amplitude factor
    (1 + eps r^6)^{-1/4} applied with its derivative.
    """
    x6 = eps * r0 ** 6
    if abs(x6) > 1e-3:
        raise ConfigError(f"inner radius too large for this energy: |eps| r0^6 = {abs(x6):.2e}")
    y = 1.0 / (2.0 * r0 ** 2)
    sr = math.sqrt(r0)
    ju, jm = jv(0.25, y), jv(-0.25, y)
    dju = 0.5 * (jv(-0.75, y) - jv(1.25, y))
    djm = 0.5 * (jv(-1.25, y) - jv(0.75, y))
    u, v = sr * ju, sr * jm
    up = 0.5 / sr * ju - r0 ** -2.5 * dju
    vp = 0.5 / sr * jm - r0 ** -2.5 * djm

    a = phase + 3.0 * math.pi / 8.0
    ca, sa = math.cos(a), math.sin(a)
    pref = math.sqrt(math.pi) / 2.0
    f0 = pref * ((ca + sa) * u - math.sqrt(2.0) * ca * v)      # sin(y + phase)
    f0p = pref * ((ca + sa) * up - math.sqrt(2.0) * ca * vp)
    g0 = -pref * ((sa - ca) * u - math.sqrt(2.0) * sa * v)     # cos(y + phase)
    g0p = -pref * ((sa - ca) * up - math.sqrt(2.0) * sa * vp)

    d = (eps * r0 ** 4 / 8.0) * (1.0 - x6 / 10.0 + x6 * x6 / 32.0)
    # d/dr of the rotation angle: k - k0 at r0 (stable form of r^-3 (sqrt(1+x6)-1))
    dprime = r0 ** -3.0 * x6 / (1.0 + math.sqrt(1.0 + x6))
    cd, sd = math.cos(d), math.sin(d)
    f = cd * f0 - sd * g0
    g = cd * g0 + sd * f0
    fp = cd * f0p - sd * g0p - dprime * g
    gp = cd * g0p + sd * f0p + dprime * f

    c_amp = (1.0 + x6) ** -0.25
    cp_amp = -1.5 * eps * r0 ** 5 * (1.0 + x6) ** -1.25
    return (
        c_amp * f, c_amp * fp + cp_amp * f,
        c_amp * g, c_amp * gp + cp_amp * g,
    )


def _numerov(q: np.ndarray, h: float, u0: float, u1: float) -> np.ndarray:
    """Solve u'' = -q u on a uniform grid given the first two values.

    Numerov in the renormalized variable v = (1 + T) u, T = h^2 q / 12:
    v_{i+1} = (2 - 12 T_i/(1 + T_i)) v_i - v_{i-1}.  Unlike the textbook
    (1 + T) coefficients, the correction 12 T/(1 + T) keeps the potential
    information at full relative precision when h^2 q is tiny, which matters
    here: phase totals of ~1e3 radians would otherwise pick up 1e-7-level
    roundoff bias.  The recurrence is a lower-banded triangular system.
    """
    n = q.size
    t = (h * h / 12.0) * q
    m = n - 2
    if m <= 0:
        return np.array([u0, u1][:n])
    d = 12.0 * t / (1.0 + t)
    v0 = (1.0 + t[0]) * u0
    v1 = (1.0 + t[1]) * u1
    # summed form: w_i = w_{i-1} - d_i v_i, v_{i+1} = v_i + w_i, interleaved as
    # z = [w_1, v_2, w_2, v_3, ...]; every structural coefficient is exactly
    # +-1 so roundoff enters only through the small d_i v_i increments
    ab = np.zeros((3, 2 * m))
    ab[0] = 1.0
    ab[1, 0:-1:2] = -1.0
    ab[1, 1:-1:2] = d[2:m + 1] if m > 1 else []
    ab[2, :-2] = -1.0
    rhs = np.zeros(2 * m)
    rhs[0] = (v1 - v0) - d[1] * v1
    rhs[1] = v1
    z = solve_banded((2, 0), ab, rhs)
    return np.concatenate(([u0, u1], z[1::2] / (1.0 + t[2:])))


def _fd_deriv(u: np.ndarray, q: np.ndarray, dq: np.ndarray, h: float, i: int) -> float:
    """O(h^4) derivative of u'' = -q u at interior index i."""
    return ((u[i + 1] - u[i - 1]) / (2.0 * h) + (h * h / 6.0) * dq[i] * u[i]) / (
        1.0 - (h * h / 6.0) * q[i]
    )


def _rk4_refine(r: float, y: np.ndarray, h: float, eps: float, nsub: int = 24) -> np.ndarray:
    """Advance (u, u') by h with RK4 substeps; used to seed Numerov segments."""
    hh = h / nsub
    for _ in range(nsub):
        def rhs(rr, yy):
            return np.array([yy[1], -(eps + rr ** -6) * yy[0]])
        k1 = rhs(r, y)
        k2 = rhs(r + hh / 2, y + hh / 2 * k1)
        k3 = rhs(r + hh / 2, y + hh / 2 * k2)
        k4 = rhs(r + hh, y + hh * k3)
        y = y + hh / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        r += hh
    return y


def chi_c(
    eps,
    scales: VdwScales | None = None,
    phase: float | None = None,
    r0: float = 0.045,
    density: float = 320.0,
    pot_suppress: float = 1.0e6,
    match_sep: float = 1.25,
    keep_pair: bool = False,
) -> ChiResult:
    """chi at scaled energy ``eps`` (< 0).

    The equation is dimensionless, so ``scales`` only documents how ``eps``
    was produced (pass a ScaledEnergy from :func:`scaled_energy`); it is not
    used numerically.  ``density`` is grid points per radian of local WKB
    phase; the outer matching radius is where |eps| exceeds the potential by
    ``pot_suppress`` and a second extraction at ``match_sep`` times that
    radius gates the matching accuracy.
    """
    del scales
    e = eps.value if isinstance(eps, ScaledEnergy) else float(eps)
    if not (_EPS_MIN <= e <= _EPS_MAX):
        raise ConfigError(f"scaled energy {e} outside supported range [{_EPS_MIN}, {_EPS_MAX}]")
    if phase is None:
        phase = CHI_PHASE_CALIBRATED
    if r0 <= 0 or r0 > 0.08:
        raise ConfigError("inner radius must lie in (0, 0.08]")

    kappa = math.sqrt(-e)
    r_turn = (-e) ** (-1.0 / 6.0)
    r_match = (pot_suppress / -e) ** (1.0 / 6.0)
    r_end = match_sep * r_match
    r_a = min(1.2 * r_turn, 0.8 * r_match)
    if r_a <= r0 * 1.5:
        raise ConfigError("inner radius too close to the turning point; lower r0")

    n_total = 0
    w_checks = []

    # --- zone A: log grid, w = psi/sqrt(r), w'' + (r^2(eps + r^-6) - 1/4) w = 0
    state = None  # (r, f, fp, g, gp); segments restart at the state's radius
    n_segments = max(2, int(math.log(r_a / r0) / math.log(1.7)) + 2)
    seg_targets = np.geomspace(r0, r_a, n_segments)[1:]
    r_start = r0
    for s1 in seg_targets:
        if s1 <= r_start * (1.0 + 1e-12):
            continue
        ht = 1.0 / (density * r_start ** -2)
        n = max(int(math.log(s1 / r_start) / ht) + 2, 8)
        t = np.linspace(math.log(r_start), math.log(s1), n)
        # mean spacing, not t[1]-t[0]: the small-difference form carries a
        # coherent 1e-10 relative step error that biases the phase
        ht = (t[-1] - t[0]) / (n - 1)
        r = np.exp(t)
        qt = r * r * (e + r ** -6) - 0.25
        dqt = 2.0 * e * r * r - 4.0 * r ** -4.0
        if state is None:
            f0, _, g0, _ = _init_pair(r[0], e, phase)
            f1, _, g1, _ = _init_pair(r[1], e, phase)
            wf0, wf1 = f0 / np.sqrt(r[0]), f1 / np.sqrt(r[1])
            wg0, wg1 = g0 / np.sqrt(r[0]), g1 / np.sqrt(r[1])
        else:
            rj, fj, fpj, gj, gpj = state
            yf = _rk4_refine(rj, np.array([fj, fpj]), r[1] - r[0], e)
            yg = _rk4_refine(rj, np.array([gj, gpj]), r[1] - r[0], e)
            wf0, wg0 = fj / math.sqrt(r[0]), gj / math.sqrt(r[0])
            wf1, wg1 = yf[0] / math.sqrt(r[1]), yg[0] / math.sqrt(r[1])
        wf = _numerov(qt, ht, wf0, wf1)
        wg = _numerov(qt, ht, wg0, wg1)
        n_total += n
        i = n - 2
        wfp = _fd_deriv(wf, qt, dqt, ht, i)
        wgp = _fd_deriv(wg, qt, dqt, ht, i)
        ri = r[i]
        sq = math.sqrt(ri)
        fj, gj = wf[i] * sq, wg[i] * sq
        fpj = (wfp + 0.5 * wf[i]) / sq
        gpj = (wgp + 0.5 * wg[i]) / sq
        w_checks.append(fj * gpj - fpj * gj)
        state = (ri, fj, fpj, gj, gpj)
        r_start = ri

    # --- zone B: linear grid in r through the turning point to r_end,
    # chunked so each chunk grows at most ~e^120, with common rescaling
    rj, fj, fpj, gj, gpj = state
    kmax = math.sqrt(abs(e + rj ** -6))
    h = 1.0 / (density * max(kmax, kappa))
    chi_inner = None
    pair_r, pair_f, pair_g = [], [], []
    growth_guard = 1e4 * max(abs(fj), abs(gj))
    check_w = True
    n_chunks = max(1, math.ceil((r_end - rj) * kappa / 120.0))
    chunk_edges = np.linspace(rj, r_end, n_chunks + 1)[1:]
    r_next = rj
    for r_stop in chunk_edges:
        n = max(int((r_stop - r_next) / h) + 2, 8)
        r = np.linspace(r_next, r_stop, n)
        hb = (r[-1] - r[0]) / (n - 1)
        q = e + r ** -6.0
        dq = -6.0 * r ** -7.0
        yf = _rk4_refine(r[0], np.array([fj, fpj]), hb, e)
        yg = _rk4_refine(r[0], np.array([gj, gpj]), hb, e)
        uf = _numerov(q, hb, fj, yf[0])
        ug = _numerov(q, hb, gj, yg[0])
        n_total += n
        if keep_pair:
            pair_r.append(r[:-2])
            pair_f.append(uf[:-2])
            pair_g.append(ug[:-2])

        def extract(idx):
            fp = _fd_deriv(uf, q, dq, hb, idx)
            gp = _fd_deriv(ug, q, dq, hb, idx)
            den = gp + kappa * ug[idx]
            return (fp + kappa * uf[idx]) / den, fp, gp

        if chi_inner is None and r_stop >= r_match:
            idx = min(max(int(np.searchsorted(r, r_match)), 1), n - 2)
            chi_inner, _, _ = extract(idx)
        if check_w:
            mid = n // 2
            if max(abs(uf[mid]), abs(ug[mid])) < growth_guard:
                fpm = _fd_deriv(uf, q, dq, hb, mid)
                gpm = _fd_deriv(ug, q, dq, hb, mid)
                w_checks.append(uf[mid] * gpm - fpm * ug[mid])
            else:
                check_w = False

        i = n - 2
        chi_outer, fpj, gpj = extract(i)
        fj, gj = uf[i], ug[i]
        r_next = r[i]
        scale = max(abs(fj), abs(gj))
        if scale > 1e100:
            fj, fpj, gj, gpj = fj / scale, fpj / scale, gj / scale, gpj / scale
        if r_stop >= r_end - 1e-12:
            break

    w0 = w_checks[0]
    wdrift = max(abs(w - w0) for w in w_checks) / abs(w0)
    drift = abs(chi_outer - chi_inner) / max(1.0, abs(chi_outer))
    if drift > 1e-6:
        raise AccuracyError(
            f"chi matching did not converge: chi({r_match:.3f}) = {chi_inner:.8g}, "
            f"chi({r_end:.3f}) = {chi_outer:.8g}, drift {drift:.2e} "
            f"(Wronskian drift {wdrift:.2e})"
        )
    pair = None
    if keep_pair:
        pair = ReferencePair(
            r=np.concatenate(pair_r),
            f=np.concatenate(pair_f),
            g=np.concatenate(pair_g),
            wronskian=w0,
            wronskian_drift=wdrift,
        )
    return ChiResult(
        chi=float(chi_outer),
        chi_inner=float(chi_inner),
        matching_drift=float(drift),
        wronskian_drift=float(wdrift),
        eps=e,
        phase=phase,
        n_points=n_total,
        pair=pair,
    )


def calibrate_phase(eps, chi_target: float, **solver_opts) -> float:
    """Phase constant that reproduces ``chi_target`` at ``eps``.

    chi transforms under the phase as chi(phase) = tan(atan(chi(0)) + phase),
    so calibration is a closed-form rotation from a single solver run.
    """
    base = chi_c(eps, phase=0.0, **solver_opts)
    return (math.atan(chi_target) - math.atan(base.chi)) % math.pi
