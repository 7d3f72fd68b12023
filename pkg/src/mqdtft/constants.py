"""Physical constants, species data and van der Waals scales.

All constants are loaded from the versioned data file ``data/atomic_data.json``
rather than hard-coded, so provenance lives in one place.  Internal computation
is SI throughout; atomic units appear only at the interfaces (C6 in a.u.,
lengths reported in Bohr radii).
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from .exceptions import ConfigError

_DATA = json.loads(
    resources.files("mqdtft").joinpath("data/atomic_data.json").read_text()
)

H_PLANCK = _DATA["constants"]["planck_h_J_s"]["value"]          # J s
HBAR = _DATA["constants"]["hbar_J_s"]["value"]                  # J s
U_KG = _DATA["constants"]["atomic_mass_unit_kg"]["value"]       # kg
BOHR_M = _DATA["constants"]["bohr_radius_m"]["value"]           # m
HARTREE_J = _DATA["constants"]["hartree_J"]["value"]            # J
U_PER_ME = _DATA["constants"]["amu_per_electron_mass"]["value"]

DATA_VERSION = _DATA["version"]


@dataclass(frozen=True)
class Species:
    """One alkali atom in its electronic ground state."""

    name: str
    mass_u: float            # atomic mass units
    nuclear_spin: float      # i, half-integer
    hyperfine_splitting_ghz: float  # upper minus lower hyperfine manifold

    electron_spin: float = 0.5

    def __post_init__(self):
        if self.mass_u <= 0:
            raise ConfigError(f"{self.name}: mass must be positive")
        if self.hyperfine_splitting_ghz <= 0:
            raise ConfigError(f"{self.name}: hyperfine splitting must be positive")
        if (2 * self.nuclear_spin) != round(2 * self.nuclear_spin):
            raise ConfigError(f"{self.name}: nuclear spin must be half-integer")

    @property
    def lower_f(self) -> float:
        return self.nuclear_spin - 0.5

    @property
    def upper_f(self) -> float:
        return self.nuclear_spin + 0.5

    @property
    def mass_kg(self) -> float:
        return self.mass_u * U_KG


def load_species(name: str) -> Species:
    """Look a species up in the bundled data file."""
    try:
        rec = _DATA["species"][name]
    except KeyError:
        raise ConfigError(
            f"unknown species {name!r}; bundled: {sorted(_DATA['species'])}"
        ) from None
    return Species(
        name=name,
        mass_u=rec["mass_u"],
        nuclear_spin=rec["nuclear_spin"],
        hyperfine_splitting_ghz=rec["hyperfine_splitting_GHz"],
    )


@dataclass(frozen=True)
class SpeciesPair:
    """An ordered heteronuclear pair; atom 1 and atom 2 keep their roles
    throughout (channel labels, frame transformation, transitions)."""

    a: Species
    b: Species

    @property
    def reduced_mass_u(self) -> float:
        return reduced_mass(self.a, self.b)

    @property
    def reduced_mass_kg(self) -> float:
        return self.reduced_mass_u * U_KG


def default_pair() -> SpeciesPair:
    return SpeciesPair(load_species("Rb87"), load_species("Rb85"))


def reduced_mass(a: Species, b: Species) -> float:
    """Reduced mass of the pair in atomic mass units."""
    if a.mass_u <= 0 or b.mass_u <= 0:
        raise ConfigError("masses must be positive")
    return a.mass_u * b.mass_u / (a.mass_u + b.mass_u)


def hyperfine_threshold(pair: SpeciesPair, f1: float, f2: float) -> float:
    """Zero-field dissociation threshold of the (F1, F2) manifold in GHz,
    measured from the (lower, lower) manifold."""
    thr = 0.0
    if f1 == pair.a.upper_f:
        thr += pair.a.hyperfine_splitting_ghz
    elif f1 != pair.a.lower_f:
        raise ConfigError(f"F1={f1} is not a hyperfine manifold of {pair.a.name}")
    if f2 == pair.b.upper_f:
        thr += pair.b.hyperfine_splitting_ghz
    elif f2 != pair.b.lower_f:
        raise ConfigError(f"F2={f2} is not a hyperfine manifold of {pair.b.name}")
    return thr


def channel_threshold(channel) -> float:
    """Threshold in GHz of a fragmentation channel (zero magnetic field)."""
    return hyperfine_threshold(channel.pair, channel.f1, channel.f2)


@dataclass(frozen=True)
class VdwScales:
    """Length and energy scales of the -C6/R^6 long-range potential.

    beta6 = (2 mu C6 / hbar^2)^(1/4); s_E = hbar^2/(2 mu beta6^2).
    """

    c6_au: float
    reduced_mass_u: float
    beta6_a0: float
    energy_scale_J: float

    @property
    def beta6_m(self) -> float:
        return self.beta6_a0 * BOHR_M

    @property
    def energy_scale_MHz(self) -> float:
        return self.energy_scale_J / H_PLANCK / 1e6

    def scaled_c6_au(self) -> float:
        """C6 recomputed from beta6 and the reduced mass (round-trip check)."""
        mu_me = self.reduced_mass_u * U_PER_ME
        return self.beta6_a0 ** 4 / (2.0 * mu_me)


def vdw_scales(c6_au: float, mu_u: float, beta6_override_a0: float | None = None) -> VdwScales:
    """Build the van der Waals scales from C6 (atomic units) and the reduced
    mass (u).

    ``beta6_override_a0`` replaces the derived length scale; the energy scale
    follows the override so the pair stays self-consistent.  Used to reproduce
    published numbers computed with a slightly different effective beta6.
    """
    if c6_au <= 0 or mu_u <= 0:
        raise ConfigError("c6 and reduced mass must be positive")
    mu_me = mu_u * U_PER_ME
    beta6_a0 = (2.0 * mu_me * c6_au) ** 0.25
    if beta6_override_a0 is not None:
        if beta6_override_a0 <= 0:
            raise ConfigError("beta6 override must be positive")
        beta6_a0 = beta6_override_a0
    beta6_m = beta6_a0 * BOHR_M
    s_e = HBAR ** 2 / (2.0 * mu_u * U_KG * beta6_m ** 2)
    return VdwScales(
        c6_au=c6_au,
        reduced_mass_u=mu_u,
        beta6_a0=beta6_a0,
        energy_scale_J=s_e,
    )
