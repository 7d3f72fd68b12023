"""Angular-momentum algebra and the frame transformation.

Clebsch-Gordan coefficients are evaluated with the Racah closed-form sum over
precomputed log-factorials (Condon-Shortley phase).  Channel bases are
enumerated at fixed total projection M and related by the orthogonal
recoupling matrix U built from products of four CG coefficients.

Quantum numbers are handled as floats holding exact half-integers; helpers
round-trip through doubled integers so equality tests are exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .constants import SpeciesPair, hyperfine_threshold
from .exceptions import ConfigError

_LOG_FACT = [0.0]


def _log_factorial(n: int) -> float:
    while len(_LOG_FACT) <= n:
        _LOG_FACT.append(_LOG_FACT[-1] + math.log(len(_LOG_FACT)))
    return _LOG_FACT[n]


def _twice(j: float) -> int:
    t = round(2 * j)
    if abs(2 * j - t) > 1e-9:
        raise ConfigError(f"{j} is not a half-integer")
    return t


def clebsch_gordan(j1, m1, j2, m2, j, m) -> float:
    """<j1 m1 j2 m2 | j m> in the Condon-Shortley convention.

    Returns 0 for violated triangle or projection rules; raises for arguments
    that are not half-integers or mix integer/half-integer parity.
    """
    tj1, tm1, tj2, tm2, tj, tm = (_twice(x) for x in (j1, m1, j2, m2, j, m))
    for tjj, tmm in ((tj1, tm1), (tj2, tm2), (tj, tm)):
        if (tjj - tmm) % 2 != 0:
            raise ConfigError("projection parity inconsistent with j")
        if tjj < 0:
            raise ConfigError("negative angular momentum")
    if tm1 + tm2 != tm:
        return 0.0
    if abs(tm1) > tj1 or abs(tm2) > tj2 or abs(tm) > tj:
        return 0.0
    if not (abs(tj1 - tj2) <= tj <= tj1 + tj2) or (tj1 + tj2 - tj) % 2 != 0:
        return 0.0

    # Racah's formula, everything in doubled quantum numbers (all even sums)
    def f(t):  # t is a doubled, even quantity
        return _log_factorial(t // 2)

    log_pref = 0.5 * (
        math.log(tj + 1.0)
        + f(tj1 + tj2 - tj) + f(tj1 - tj2 + tj) + f(-tj1 + tj2 + tj)
        - f(tj1 + tj2 + tj + 2)
        + f(tj1 + tm1) + f(tj1 - tm1)
        + f(tj2 + tm2) + f(tj2 - tm2)
        + f(tj + tm) + f(tj - tm)
    )
    kmin = max(0, (tj2 - tm1 - tj) // 2, (tj1 + tm2 - tj) // 2)
    kmax = min((tj1 + tj2 - tj) // 2, (tj1 - tm1) // 2, (tj2 + tm2) // 2)
    total = 0.0
    for k in range(kmin, kmax + 1):
        log_den = (
            _log_factorial(k)
            + _log_factorial((tj1 + tj2 - tj) // 2 - k)
            + _log_factorial((tj1 - tm1) // 2 - k)
            + _log_factorial((tj2 + tm2) // 2 - k)
            + _log_factorial((tj - tj2 + tm1) // 2 + k)
            + _log_factorial((tj - tj1 - tm2) // 2 + k)
        )
        total += (-1.0) ** k * math.exp(log_pref - log_den)
    return total


@dataclass(frozen=True)
class FragChannel:
    """Large-separation channel |F1 mF1; F2 mF2> with its zero-field threshold."""

    pair: SpeciesPair
    f1: float
    mf1: float
    f2: float
    mf2: float
    threshold_ghz: float = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if abs(self.mf1) > self.f1 or abs(self.mf2) > self.f2:
            raise ConfigError("projection exceeds F")
        if self.threshold_ghz is None:
            object.__setattr__(
                self, "threshold_ghz", hyperfine_threshold(self.pair, self.f1, self.f2)
            )

    @property
    def m_total(self) -> float:
        return self.mf1 + self.mf2

    def labels(self):
        return (self.f1, self.mf1, self.f2, self.mf2)

    def short_label(self) -> str:
        return f"{{{self.mf1:+g};{self.mf2:+g}}}"

    def __str__(self):
        return f"(F1={self.f1:g},mF1={self.mf1:g}; F2={self.f2:g},mF2={self.mf2:g})"


@dataclass(frozen=True)
class EigenChannel:
    """Short-range channel (S, MS; I, MI); class tag assigned downstream."""

    s: int
    ms: float
    i: float
    mi: float

    def labels(self):
        return (self.s, self.ms, self.i, self.mi)

    def __str__(self):
        return f"({self.s:g},{self.ms:g}; {self.i:g},{self.mi:g})"


def enumerate_frag_channels(pair: SpeciesPair, m_total: float) -> list[FragChannel]:
    """All fragmentation channels with mF1 + mF2 = M.

    Deterministic order: ascending threshold, then lexicographic in
    (F1, mF1, F2, mF2).  Empty when |M| exceeds the stretched projection.
    """
    out = []
    for f1 in (pair.a.lower_f, pair.a.upper_f):
        for f2 in (pair.b.lower_f, pair.b.upper_f):
            mf1 = -f1
            while mf1 <= f1:
                mf2 = m_total - mf1
                if abs(mf2) <= f2 and _twice(mf2 + f2) % 2 == 0:
                    out.append(FragChannel(pair, f1, mf1, f2, mf2))
                mf1 += 1
    out.sort(key=lambda c: (c.threshold_ghz, c.f1, c.mf1, c.f2, c.mf2))
    return out


def enumerate_eigenchannels(pair: SpeciesPair, m_total: float) -> list[EigenChannel]:
    """All (S, MS; I, MI) channels with MS + MI = M.

    Order: S ascending, then I, then MS.
    """
    i1, i2 = pair.a.nuclear_spin, pair.b.nuclear_spin
    out = []
    for s in (0, 1):
        for tms in range(-2 * s, 2 * s + 1, 2):
            ms = tms / 2.0
            mi = m_total - ms
            i_val = abs(i1 - i2)
            while i_val <= i1 + i2:
                if abs(mi) <= i_val:
                    out.append(EigenChannel(s, ms, i_val, mi))
                i_val += 1
    out.sort(key=lambda e: (e.s, e.i, e.ms))
    return out


@dataclass(frozen=True)
class ChannelSpace:
    """Both channel bases at fixed M plus the recoupling matrix U.

    U rows follow ``frag`` order, columns follow ``eigen`` order; U is
    orthogonal because the two bases span the same spin space.
    """

    pair: SpeciesPair
    m_total: float
    frag: tuple[FragChannel, ...]
    eigen: tuple[EigenChannel, ...]
    u: np.ndarray

    @property
    def size(self) -> int:
        return len(self.frag)

    def frag_index(self, f1, mf1, f2, mf2) -> int:
        tgt = tuple(_twice(x) for x in (f1, mf1, f2, mf2))
        for i, ch in enumerate(self.frag):
            if tuple(_twice(x) for x in ch.labels()) == tgt:
                return i
        raise ConfigError(f"no fragmentation channel ({f1},{mf1};{f2},{mf2}) at M={self.m_total}")


def frame_transform(pair: SpeciesPair, frag, eigen) -> np.ndarray:
    """Recoupling matrix U_{i,alpha} = <F1 mF1, F2 mF2 | S MS, I MI>.

    Each element is a sum over the product basis |ms1 mi1 ms2 mi2> of four
    CG coefficients (two atomic recouplings, the electronic pair and the
    nuclear pair).
    """
    if len(frag) != len(eigen):
        raise ConfigError(
            f"basis mismatch: {len(frag)} fragmentation vs {len(eigen)} eigenchannels"
        )
    i1, i2 = pair.a.nuclear_spin, pair.b.nuclear_spin
    s12 = 0.5
    u = np.zeros((len(frag), len(eigen)))
    for i, ch in enumerate(frag):
        for a, e in enumerate(eigen):
            acc = 0.0
            for ms1 in (-0.5, 0.5):
                mi1 = ch.mf1 - ms1
                if abs(mi1) > i1:
                    continue
                for ms2 in (-0.5, 0.5):
                    mi2 = ch.mf2 - ms2
                    if abs(mi2) > i2:
                        continue
                    if ms1 + ms2 != e.ms or mi1 + mi2 != e.mi:
                        continue
                    acc += (
                        clebsch_gordan(s12, ms1, i1, mi1, ch.f1, ch.mf1)
                        * clebsch_gordan(s12, ms2, i2, mi2, ch.f2, ch.mf2)
                        * clebsch_gordan(s12, ms1, s12, ms2, e.s, e.ms)
                        * clebsch_gordan(i1, mi1, i2, mi2, e.i, e.mi)
                    )
            u[i, a] = acc
    return u


def channel_space(pair: SpeciesPair, m_total: float) -> ChannelSpace:
    """Enumerate both bases at M and compute U."""
    frag = enumerate_frag_channels(pair, m_total)
    eigen = enumerate_eigenchannels(pair, m_total)
    u = frame_transform(pair, frag, eigen)
    return ChannelSpace(pair, m_total, tuple(frag), tuple(eigen), u)


def channel_table(space: ChannelSpace) -> str:
    """Plain-text table of a channel space for CLI inspection."""
    lines = [f"M = {space.m_total:g}: {space.size} fragmentation / {space.size} eigenchannels"]
    lines.append("fragmentation channels (threshold order):")
    for i, ch in enumerate(space.frag):
        lines.append(f"  [{i}] {ch}  threshold {ch.threshold_ghz:.6f} GHz")
    lines.append("eigenchannels:")
    for a, e in enumerate(space.eigen):
        lines.append(f"  [{a}] {e}")
    ortho = np.abs(space.u @ space.u.T - np.eye(space.size)).max()
    lines.append(f"U orthogonality residual: {ortho:.2e}")
    return "\n".join(lines)
