"""Collisional-shift forward model, synthetic data and one-parameter fits.

A microwave transition on one atom of a trapped pair moves the collision
channel, so the two-atom resonance is offset from the single-atom one by the
difference of the two pair interaction energies.  The sign is carried by the
transition direction: +1 when the interrogated atom starts in its lower
hyperfine manifold (absorption upward), -1 otherwise.  This single rule
reproduces both measured signs (the Rb87 shift is negative, the Rb85 shift
positive, with the same energy ordering) because Rb85 is interrogated
downward from F = 3.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .constants import SpeciesPair
from .exceptions import BracketError, ConfigError
from .trap import TrapGeometry, a_to_energy, pseudopotential_validity, trap_geometry


@dataclass(frozen=True)
class TransitionSpec:
    """Microwave transition of one atom with its spectator-defined channels.

    Channels are (F1, mF1, F2, mF2); exactly the interrogated atom's slot
    changes between initial and final.  One of the scattering lengths may be
    None, marking it unknown (to be fitted).
    """

    pair: SpeciesPair
    interrogated: str                 # "a" or "b"
    initial_state: tuple              # (F, mF) of the interrogated atom
    final_state: tuple
    initial_channel: tuple            # (F1, mF1, F2, mF2)
    final_channel: tuple
    a_initial_a0: float | None
    a_final_a0: float | None

    def __post_init__(self):
        if self.interrogated not in ("a", "b"):
            raise ConfigError("interrogated must be 'a' or 'b'")
        i, f = self.initial_channel, self.final_channel
        if self.interrogated == "a":
            if i[:2] != tuple(self.initial_state) or f[:2] != tuple(self.final_state):
                raise ConfigError("channel F1 slots must match the interrogated states")
            if i[2:] != f[2:]:
                raise ConfigError("spectator (atom 2) state must not change")
        else:
            if i[2:] != tuple(self.initial_state) or f[2:] != tuple(self.final_state):
                raise ConfigError("channel F2 slots must match the interrogated states")
            if i[:2] != f[:2]:
                raise ConfigError("spectator (atom 1) state must not change")
        species = self.pair.a if self.interrogated == "a" else self.pair.b
        if self.initial_state[0] == self.final_state[0]:
            raise ConfigError("transition must change the hyperfine manifold")
        if self.initial_state[0] not in (species.lower_f, species.upper_f):
            raise ConfigError(f"F={self.initial_state[0]} not a manifold of {species.name}")

    @property
    def direction(self) -> int:
        species = self.pair.a if self.interrogated == "a" else self.pair.b
        return +1 if self.initial_state[0] == species.lower_f else -1

    @property
    def unknown(self) -> str | None:
        if self.a_initial_a0 is None and self.a_final_a0 is None:
            raise ConfigError("both scattering lengths unknown")
        if self.a_initial_a0 is None:
            return "initial"
        if self.a_final_a0 is None:
            return "final"
        return None

    def with_unknown(self, a_a0: float) -> "TransitionSpec":
        if self.unknown == "initial":
            return replace(self, a_initial_a0=a_a0)
        if self.unknown == "final":
            return replace(self, a_final_a0=a_a0)
        raise ConfigError("transition has no unknown scattering length")


def make_transition(
    pair: SpeciesPair,
    interrogated: str,
    initial: tuple,
    final: tuple,
    spectator: tuple,
    a_initial_a0: float | None = None,
    a_final_a0: float | None = None,
) -> TransitionSpec:
    """Assemble a TransitionSpec from the interrogated states and the fixed
    spectator state."""
    if interrogated == "a":
        ic = (*initial, *spectator)
        fc = (*final, *spectator)
    else:
        ic = (*spectator, *initial)
        fc = (*spectator, *final)
    return TransitionSpec(pair, interrogated, tuple(initial), tuple(final),
                          ic, fc, a_initial_a0, a_final_a0)


@dataclass(frozen=True)
class Measurement:
    """One shift measurement at an axial trap frequency (ordinary kHz)."""

    f_ax_khz: float
    shift_khz: float
    sigma_khz: float

    def __post_init__(self):
        if self.sigma_khz <= 0:
            raise ConfigError("sigma must be positive")


@dataclass(frozen=True)
class FitResult:
    a_hat_a0: float
    sigma_a_a0: float
    chi2: float
    residuals_khz: tuple[float, ...]

    @property
    def ndof(self) -> int:
        return max(len(self.residuals_khz) - 1, 1)


def predict_shift(t: TransitionSpec, trap: TrapGeometry, scales=None) -> float:
    """Collisional shift in kHz (two-atom minus single-atom resonance)."""
    if t.unknown is not None:
        raise ConfigError("both scattering lengths must be known to predict a shift")
    if scales is not None:
        _, verdict = pseudopotential_validity(trap, scales)
        if verdict == "invalid":
            raise ConfigError(
                "pseudopotential approximation invalid for this trap (beta6 >= d_r)"
            )
    eps_i = a_to_energy(t.a_initial_a0, trap).value
    eps_f = a_to_energy(t.a_final_a0, trap).value
    return t.direction * (eps_f - eps_i) * trap.f_ax_khz


@dataclass(frozen=True)
class ShiftPoint:
    f_ax_khz: float
    shift_khz: float          # nan when the point errored
    error: str | None = None


def shift_curve(t: TransitionSpec, f_ax_list_khz, eta: float, scales=None) -> list[ShiftPoint]:
    """Shift versus axial frequency at fixed aspect ratio (omega_r = eta omega_ax).

    Per-point failures are reported on the point; the curve continues.
    """
    out = []
    for f_ax in f_ax_list_khz:
        try:
            trap = trap_geometry(t.pair, eta * f_ax, f_ax)
            out.append(ShiftPoint(f_ax, predict_shift(t, trap, scales)))
        except Exception as exc:  # noqa: BLE001 - per-point error reporting
            out.append(ShiftPoint(f_ax, math.nan, f"{type(exc).__name__}: {exc}"))
    return out


def synthesize_measurements(
    t: TransitionSpec, eta: float, f_ax_list_khz, a_true_a0: float,
    sigma_khz: float, seed: int,
) -> list[Measurement]:
    """Forward-model shifts with Gaussian noise, deterministic in the seed."""
    rng = np.random.default_rng(seed)
    tt = t.with_unknown(a_true_a0) if t.unknown is not None else t
    out = []
    for f_ax in f_ax_list_khz:
        trap = trap_geometry(tt.pair, eta * f_ax, f_ax)
        model = predict_shift(tt, trap)
        noise = rng.normal(0.0, sigma_khz) if sigma_khz > 0 else 0.0
        out.append(Measurement(f_ax, model + noise, sigma_khz if sigma_khz > 0 else 1.0))
    return out


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_min(fun, lo: float, hi: float, xtol: float):
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = fun(c), fun(d)
    while abs(b - a) > xtol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = fun(d)
    return (a + b) / 2.0


def fit_scattering_length(
    data: list[Measurement],
    t: TransitionSpec,
    eta: float,
    bracket_a0: tuple[float, float] = (-1000.0, 1000.0),
    xtol_a0: float = 1e-3,
) -> FitResult:
    """Least-squares estimate of the one unknown scattering length.

    chi^2(a) is minimized by golden section inside ``bracket_a0``; the
    uncertainty is the half-width of the chi^2_min + 1 interval.
    """
    if len(data) < 2:
        raise ConfigError("need at least two data points")
    if t.unknown is None:
        raise ConfigError("transition has no unknown scattering length to fit")

    traps = [trap_geometry(t.pair, eta * m.f_ax_khz, m.f_ax_khz) for m in data]
    # reference-channel energies do not depend on the fitted a
    known = t.a_initial_a0 if t.unknown == "final" else t.a_final_a0
    eps_known = [a_to_energy(known, trap).value for trap in traps]
    sign = t.direction if t.unknown == "final" else -t.direction

    def chi2(a: float) -> float:
        total = 0.0
        for m, trap, eps_ref in zip(data, traps, eps_known):
            eps_u = a_to_energy(a, trap).value
            model = sign * (eps_u - eps_ref) * trap.f_ax_khz
            total += ((model - m.shift_khz) / m.sigma_khz) ** 2
        return total

    lo, hi = bracket_a0
    probes = [chi2(lo), chi2(0.5 * (lo + hi)), chi2(hi)]
    if max(probes) - min(probes) < 1e-9:
        raise ConfigError("chi^2 is flat in a: fit is ill posed")
    a_hat = _golden_min(chi2, lo, hi, xtol_a0)
    if min(a_hat - lo, hi - a_hat) < 10.0 * xtol_a0:
        raise BracketError(f"minimizer at the bracket edge: a = {a_hat:.1f} a0")
    c_min = chi2(a_hat)

    def crossing(outer: float) -> float:
        from scipy.optimize import brentq

        f = lambda a: chi2(a) - (c_min + 1.0)
        if f(outer) < 0:
            return outer  # chi^2 + 1 never reached on this side
        return brentq(f, min(a_hat, outer), max(a_hat, outer), xtol=1e-3)

    hi_cross = crossing(hi)
    lo_cross = crossing(lo)
    if hi_cross == hi and lo_cross == lo:
        raise BracketError("chi^2 + 1 not reached anywhere inside the bracket")
    sigma_a = 0.5 * (hi_cross - lo_cross)

    residuals = []
    tt = t.with_unknown(a_hat)
    for m, trap in zip(data, traps):
        residuals.append(predict_shift(tt, trap) - m.shift_khz)
    return FitResult(
        a_hat_a0=float(a_hat),
        sigma_a_a0=float(sigma_a),
        chi2=float(c_min),
        residuals_khz=tuple(residuals),
    )


def average_estimates(results: list[FitResult]) -> tuple[float, float]:
    """Plain (unweighted) average of independent estimates; the quoted
    uncertainty is the mean of the individual ones."""
    if not results:
        raise ConfigError("nothing to average")
    a = sum(r.a_hat_a0 for r in results) / len(results)
    s = sum(r.sigma_a_a0 for r in results) / len(results)
    return a, s


# ------------------------------------------------------------------- CSV

MEASUREMENT_HEADER = "omega_ax_khz,shift_khz,sigma_khz"


def write_measurements(path, data: list[Measurement]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(MEASUREMENT_HEADER + "\n")
        for m in data:
            fh.write(f"{m.f_ax_khz!r},{m.shift_khz!r},{m.sigma_khz!r}\n")


def read_measurements(path, default_sigma_khz: float | None = None) -> list[Measurement]:
    """Measurement CSV: header line, '#' comment lines, optional sigma column
    (filled from ``default_sigma_khz`` when missing)."""
    out = []
    with open(path, encoding="utf-8") as fh:
        header = None
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if header is None:
                header = [c.strip() for c in line.split(",")]
                expected = MEASUREMENT_HEADER.split(",")
                if header not in (expected, expected[:2]):
                    raise ConfigError(
                        f"unexpected measurement header {line!r}; want {MEASUREMENT_HEADER!r}"
                    )
                continue
            cols = [c.strip() for c in line.split(",")]
            if len(cols) != len(header):
                raise ConfigError(f"row {line!r} does not match the header")
            f_ax, shift = float(cols[0]), float(cols[1])
            if len(cols) == 3:
                sigma = float(cols[2])
            elif default_sigma_khz is not None:
                sigma = default_sigma_khz
            else:
                raise ConfigError("sigma column missing and no default configured")
            out.append(Measurement(f_ax, shift, sigma))
    if header is None:
        raise ConfigError(f"{path}: no header line found")
    return out
