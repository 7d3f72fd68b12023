"""Two interacting atoms in a cigar-shaped harmonic trap.

The relative-motion energy of a trapped pair with s-wave scattering length a
obeys the implicit relation

    -sqrt(pi) / (a / d_ax) = F(-eps / 2),

    F(x) = -2 sqrt(pi) G(x)/G(x - 1/2)
           + sqrt(pi) G(x)/G(x + 1/2) * sum_{m=1}^{n-1} 2F1(1, x; x + 1/2; e^{i 2 pi m / n}),

with G the Gamma function and n = omega_r/omega_ax the integer trap
anisotropy.  The unit and offset conventions are pinned by three invariants
(tested): the n = 1 case reduces exactly to the isotropic two-atom relation,
eps -> 0 as a -> 0 (the noninteracting ground level sits at a pole of F),
and d eps/d a at a = 0 equals the first-order contact shift
2 hbar^2/(sqrt(pi) mu d_r^2 d_ax) in energy units hbar*omega_ax.  That forces
eps = (E - E0)/(hbar omega_ax) with E0 the noninteracting ground energy and
a measured in units of d_ax = sqrt(hbar/(mu omega_ax)).

The hypergeometric factor is evaluated on the unit circle, where the defining
series converges only conditionally (c - a - b = -1/2): away from z = 1 a
direct head sum is completed with an Euler-transformed tail; close to z = 1
the z -> 1-z linear transformation is used, whose second term is closed-form
here because b = c after the transformation.  Both paths carry an internal
error estimate and raise AccuracyError above 1e-8.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq
from scipy.special import gammaln

from .constants import BOHR_M, HBAR, SpeciesPair, VdwScales
from .exceptions import AccuracyError, BracketError, ConfigError, PoleError

SQRT_PI = math.sqrt(math.pi)


# ---------------------------------------------------------------- gamma

def log_gamma_signed(x: float):
    """(log|Gamma(x)|, sign) for real non-pole x, reflection for x < 0."""
    if x > 0:
        return float(gammaln(x)), 1.0
    if abs(x - round(x)) < 1e-10:
        raise PoleError(f"Gamma pole at x = {x}")
    s = math.sin(math.pi * x)
    return math.log(math.pi) - math.log(abs(s)) - float(gammaln(1.0 - x)), math.copysign(1.0, s)


def gamma_ratio(num: float, den: float) -> float:
    """Gamma(num)/Gamma(den), stable for negative arguments."""
    ln_n, s_n = log_gamma_signed(num)
    ln_d, s_d = log_gamma_signed(den)
    return s_n * s_d * math.exp(ln_n - ln_d)


# ---------------------------------------------------------- hypergeometric

def hyp2f1_series(x: float, z: complex, tol: float = 1e-14, kmax: int = 100_000) -> complex:
    """Direct defining series of 2F1(1, x; x+1/2; z) for |z| < 1 (z = 0 -> 1)."""
    if abs(z) >= 1.0:
        raise ConfigError("direct series requires |z| < 1")
    t = 1.0 + 0j
    s = 1.0 + 0j
    for k in range(1, kmax):
        t *= (x + k - 1) / (x + k - 0.5) * z
        s += t
        if abs(t) < tol * abs(s) and k > max(8, -x):
            return s
    raise AccuracyError("series did not converge (|z| too close to 1)")


def _check_pole(x: float):
    r = round(x + 0.5)
    if r <= 0 and abs(x + 0.5 - r) < 1e-12:
        raise PoleError(f"2F1(1, x; x+1/2; z) pole: x + 1/2 = {r}")


def _hyp2f1_near_one(x: float, phi: float):
    """z -> 1-z connection; valid and fast for phi near 0 mod 2pi.

    2F1(1,x;x+1/2;z) = (1-2x) 2F1(1,x;3/2;1-z)
                       + sqrt(pi) [Gamma(x+1/2)/Gamma(x)] (1-z)^{-1/2} z^{1/2-x}
    (second term closed-form since the transformed b equals c).
    """
    z = cmath.exp(1j * phi)
    u = 1.0 - z
    t = 1.0 + 0j
    s = 1.0 + 0j
    est = math.inf
    for k in range(1, 4000):
        t *= (x + k - 1) / (0.5 + k) * u
        s += t
        est = abs(t) / max(abs(s), 1e-300)
        if est < 1e-14 and k > max(8, -x):
            break
    second = SQRT_PI * gamma_ratio(x + 0.5, x) * u ** -0.5 * z ** (0.5 - x)
    return (1.0 - 2.0 * x) * s + second, est


def _hyp2f1_euler_tail(x: float, phi: float, ndiff: int = 16):
    """Head sum + Euler-transformed tail; good away from z = 1."""
    z = cmath.exp(1j * phi)
    w = z / (1.0 - z)
    aw = abs(w)
    K = max(48, math.ceil(3.4 * max(0.0, -(x + 0.5))), math.ceil(40.0 * aw))
    c = 1.0
    s = 0.0 + 0j
    zk = 1.0 + 0j
    for k in range(K):
        s += c * zk
        c *= (x + k) / (x + k + 0.5)
        zk *= z
    cs = np.empty(ndiff + 1)
    for j in range(ndiff + 1):
        cs[j] = c
        c *= (x + K + j) / (x + K + j + 0.5)
    pref = zk / (1.0 - z)
    tail = 0.0 + 0j
    wj = 1.0 + 0j
    diffs = cs.copy()
    best = math.inf
    used = 0
    for j in range(ndiff + 1):
        term = wj * diffs[0]
        at = abs(term)
        tail += term
        used = j + 1
        if at < best:
            best = at
        elif at > 3.0 * best and j > 4:
            tail -= term           # past the asymptotic minimum
            used = j
            break
        wj *= w
        diffs = diffs[1:] - diffs[:-1]
        if diffs.size == 0:
            break
    noise = 1e-16 * cs.max() * (2.0 * max(1.0, aw)) ** used
    val = s + pref * tail
    est = (best + noise) * abs(pref) / max(abs(val), 1e-300)
    return val, est


def hyp2f1_unit_circle(x: float, phi: float) -> complex:
    """2F1(1, x; x+1/2; e^{i phi}) for phi in (0, 2 pi), to ~1e-10 relative.

    Raises PoleError at the parameter poles x + 1/2 in {0, -1, ...}, ConfigError
    for phi at 0 mod 2pi, and AccuracyError if the internal estimate exceeds
    1e-8.
    """
    phi = float(phi)
    if not 0.0 < phi < 2.0 * math.pi:
        raise ConfigError("phi must lie strictly inside (0, 2 pi)")
    _check_pole(x)
    xr = round(x)
    if x == xr and xr <= 0:
        # terminating series: exact polynomial
        z = cmath.exp(1j * phi)
        t = 1.0 + 0j
        s = 1.0 + 0j
        for k in range(1, -int(xr) + 1):
            t *= (x + k - 1) / (x + k - 0.5) * z
            s += t
        return s
    phi_eff = min(phi, 2.0 * math.pi - phi)
    if phi_eff < 0.35:
        val, est = _hyp2f1_near_one(x, phi)
    else:
        val, est = _hyp2f1_euler_tail(x, phi)
    if est > 1e-8:
        raise AccuracyError(
            f"2F1 internal error estimate {est:.2e} above 1e-8 at x={x}, phi={phi}"
        )
    return val


def big_f(x: float, n: int) -> float:
    """The trap function F(x) for integer anisotropy n >= 1.

    The m and n-m terms of the sum are conjugates, so the imaginary part must
    vanish; a residual above 1e-10 (relative) signals a special-function bug
    and raises AccuracyError.
    """
    if n < 1 or n != int(n):
        raise ConfigError("n must be a positive integer")
    term1 = -2.0 * SQRT_PI * gamma_ratio(x, x - 0.5)
    if n == 1:
        return term1
    total = 0.0 + 0j
    for m in range(1, n):
        total += hyp2f1_unit_circle(x, 2.0 * math.pi * m / n)
    if abs(total.imag) > 1e-10 * (1.0 + abs(total)):
        raise AccuracyError(
            f"imaginary residual {total.imag:.2e} in the hypergeometric sum at x={x}, n={n}"
        )
    return term1 + SQRT_PI * gamma_ratio(x, x + 0.5) * total.real


# ---------------------------------------------------------------- trap

@dataclass(frozen=True)
class TrapGeometry:
    """Axially symmetric trap for the relative motion of a pair.

    Frequencies are angular (rad/s).  The dimensionless level structure uses
    the integer anisotropy n = round(omega_r/omega_ax); the rounding gate is a
    hard error because the implicit relation has no meaning at non-integer
    anisotropy.
    """

    omega_r: float
    omega_ax: float
    reduced_mass_kg: float
    gate: float = 0.25

    def __post_init__(self):
        if not self.omega_r >= self.omega_ax > 0:
            raise ConfigError("need omega_r >= omega_ax > 0 (cigar trap)")
        if self.reduced_mass_kg <= 0:
            raise ConfigError("reduced mass must be positive")
        if abs(self.eta - self.n) > self.gate:
            raise ConfigError(
                f"anisotropy {self.eta:.3f} is more than {self.gate} from integer {self.n}"
            )

    @property
    def eta(self) -> float:
        return self.omega_r / self.omega_ax

    @property
    def n(self) -> int:
        return round(self.omega_r / self.omega_ax)

    @property
    def d_r_m(self) -> float:
        return math.sqrt(HBAR / (self.reduced_mass_kg * self.omega_r))

    @property
    def d_ax_m(self) -> float:
        return math.sqrt(HBAR / (self.reduced_mass_kg * self.omega_ax))

    @property
    def d_r_a0(self) -> float:
        return self.d_r_m / BOHR_M

    @property
    def d_ax_a0(self) -> float:
        return self.d_ax_m / BOHR_M

    @property
    def f_ax_khz(self) -> float:
        return self.omega_ax / (2.0 * math.pi) / 1e3


def trap_geometry(pair: SpeciesPair, f_r_khz: float, f_ax_khz: float, gate: float = 0.25) -> TrapGeometry:
    """Trap from ordinary frequencies in kHz."""
    return TrapGeometry(
        omega_r=2.0 * math.pi * f_r_khz * 1e3,
        omega_ax=2.0 * math.pi * f_ax_khz * 1e3,
        reduced_mass_kg=pair.reduced_mass_kg,
        gate=gate,
    )


@dataclass(frozen=True)
class TrapEnergy:
    """Relative-motion energy above the noninteracting ground level, in units
    of hbar*omega_ax; branch 0 is the level connected to eps = 0 as a -> 0."""

    value: float
    branch: int = 0


_SCAN_SAMPLES = 600


@lru_cache(maxsize=64)
def _f_zero(n: int, lo: float, hi: float) -> float:
    """Zero of F(-eps/2) for eps in (lo, hi); brackets by sign scan."""
    eps_grid = np.linspace(lo + 1e-9, hi - 1e-9, _SCAN_SAMPLES)
    vals = []
    for epsv in eps_grid:
        try:
            vals.append(big_f(-epsv / 2.0, n))
        except PoleError:
            vals.append(math.nan)
    signs = np.sign(vals)
    for i in range(len(eps_grid) - 1):
        if math.isnan(vals[i]) or math.isnan(vals[i + 1]):
            continue
        if signs[i] != signs[i + 1]:
            return brentq(
                lambda epsv: big_f(-epsv / 2.0, n), eps_grid[i], eps_grid[i + 1], xtol=1e-13
            )
    raise BracketError(
        f"no zero of F found in eps-range ({lo}, {hi}) for n={n}; "
        f"sign pattern {''.join('+' if s > 0 else '-' for s in signs[:60])}..."
    )


def _branch_interval(n: int, branch: int, positive_a: bool):
    """(eps_lo, eps_hi) bracketing the branch solution for the sign of a."""
    if branch < 0:
        raise ConfigError("branch must be >= 0")
    pole = 2.0 * branch
    # keep bracket edges outside the Gamma pole windows of big_f
    edge = 1e-8
    if positive_a:
        zero = _f_zero(n, pole, pole + 2.0)
        return pole + edge, zero - 1e-13
    if branch == 0:
        lo = -2.0
        while lo > -80.0:
            try:
                zero = _f_zero(n, lo, 0.0)
                break
            except BracketError:
                lo *= 2.0
        else:
            raise BracketError("no zero of F below eps = 0")
        return zero + 1e-13, -edge
    zero = _f_zero(n, pole - 2.0, pole)
    return zero + 1e-13, pole - edge


def energy_to_a(eps: TrapEnergy, trap: TrapGeometry) -> float:
    """Scattering length (Bohr radii) whose branch solution sits at ``eps``."""
    f_val = big_f(-eps.value / 2.0, trap.n)
    if abs(f_val) > 1e12:
        return 0.0
    return -SQRT_PI / f_val * trap.d_ax_m / BOHR_M


@lru_cache(maxsize=64)
def _branch_nodes(n: int, branch: int, positive_a: bool):
    """Sampled (eps, F) nodes on one monotone piece of a branch, used to seed
    tight root brackets.  F is increasing in eps on each piece."""
    lo, hi = _branch_interval(n, branch, positive_a)
    # cluster nodes toward the pole end, where F diverges
    u = np.linspace(0.0, 1.0, 240)
    w = u ** 3
    if positive_a:
        eps_nodes = lo + (hi - lo) * w          # pole at lo
    else:
        eps_nodes = hi - (hi - lo) * w[::-1]    # pole at hi
        eps_nodes = np.sort(eps_nodes)
    f_nodes = np.array([big_f(-ev / 2.0, n) for ev in eps_nodes])
    return eps_nodes, f_nodes


def a_to_energy(a_a0: float, trap: TrapGeometry, branch: int = 0) -> TrapEnergy:
    """Relative-motion energy on the given branch for scattering length a.

    Bracketed root solve of the implicit relation between the pole of F at
    the branch's noninteracting level and the adjacent zero of F; the bracket
    is narrowed with precomputed nodes of the monotone F piece.
    """
    if not math.isfinite(a_a0):
        raise ConfigError("scattering length must be finite")
    astar = a_a0 * BOHR_M / trap.d_ax_m
    if astar == 0.0:
        return TrapEnergy(value=2.0 * branch, branch=branch)
    target = -SQRT_PI / astar
    positive = astar > 0
    eps_nodes, f_nodes = _branch_nodes(trap.n, branch, positive)
    idx = int(np.searchsorted(f_nodes, target))
    if 0 < idx < len(f_nodes):
        lo, hi = float(eps_nodes[idx - 1]), float(eps_nodes[idx])
    else:
        lo, hi = _branch_interval(trap.n, branch, positive)
        f_lo = big_f(-lo / 2.0, trap.n) - target
        f_hi = big_f(-hi / 2.0, trap.n) - target
        if f_lo * f_hi > 0:
            raise BracketError(
                f"no sign change in eps bracket ({lo:.6g}, {hi:.6g}) for a = {a_a0} a0: "
                f"end values {f_lo:.3g}, {f_hi:.3g} "
                f"(|a| may be too small: solution closer than 1e-8 to a pole of F)"
            )
    eps = brentq(lambda e: big_f(-e / 2.0, trap.n) - target, lo, hi, xtol=1e-12)
    return TrapEnergy(value=float(eps), branch=branch)


def pseudopotential_validity(trap: TrapGeometry, scales: VdwScales):
    """beta6/d_r ratio with a verdict: valid below 0.5, warning up to 1.0."""
    ratio = scales.beta6_a0 / trap.d_r_a0
    if ratio < 0.5:
        verdict = "valid"
    elif ratio < 1.0:
        verdict = "warning"
    else:
        verdict = "invalid"
    return ratio, verdict
