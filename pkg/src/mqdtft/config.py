"""Run configuration: JSON schema, validation and object builders.

Configs are plain JSON validated against a closed schema (unknown keys are
rejected with their location) before any computation touches them.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import jsonschema

from . import mqdt
from .constants import SpeciesPair, load_species, vdw_scales
from .exceptions import ConfigError
from .shifts import TransitionSpec, make_transition

_CHANNEL = {
    "type": "object",
    "properties": {
        "f1": {"type": "number"},
        "mf1": {"type": "number"},
        "f2": {"type": "number"},
        "mf2": {"type": "number"},
    },
    "required": ["f1", "mf1", "f2", "mf2"],
    "additionalProperties": False,
}

_DEFECTS = {
    "type": "object",
    "properties": {
        "mu_s_ei": {"type": "number"},
        "mu_t_ei": {"type": "number"},
        "mu_t_es": {"type": ["number", "null"]},
    },
    "required": ["mu_s_ei", "mu_t_ei"],
    "additionalProperties": False,
}

_STATE = {
    "type": "array",
    "items": {"type": "number"},
    "minItems": 2,
    "maxItems": 2,
}

SCHEMA = {
    "type": "object",
    "properties": {
        "notes": {"type": "string"},
        "species": {
            "type": "object",
            "properties": {
                "atom1": {"type": "string"},
                "atom2": {"type": "string"},
            },
            "required": ["atom1", "atom2"],
            "additionalProperties": False,
        },
        "c6_au": {"type": "number", "exclusiveMinimum": 0},
        "beta6_a0": {"type": "number", "exclusiveMinimum": 0},
        "defects": _DEFECTS,
        "rows": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "label": {"type": "string"},
                    "entrance": _CHANNEL,
                    "defects": _DEFECTS,
                    "compare_a_exp": {"type": "string"},
                    "compare_a_cc": {"type": "number"},
                },
                "required": ["entrance"],
                "additionalProperties": False,
            },
            "minItems": 1,
        },
        "chi_source": {"enum": ["auto", "configured", "computed"]},
        "chi_overrides": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "f1": {"type": "number"},
                    "mf1": {"type": "number"},
                    "f2": {"type": "number"},
                    "mf2": {"type": "number"},
                    "chi": {"type": "number"},
                },
                "required": ["f1", "mf1", "f2", "mf2", "chi"],
                "additionalProperties": False,
            },
        },
        "chi_phase": {"type": "number"},
        "class_overrides": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "s": {"type": "integer"},
                    "ms": {"type": "number"},
                    "i": {"type": "number"},
                    "mi": {"type": "number"},
                    "class": {"enum": ["EI", "ES"]},
                },
                "required": ["s", "ms", "i", "mi", "class"],
                "additionalProperties": False,
            },
        },
        "trap": {
            "type": "object",
            "properties": {
                "f_radial_khz": {"type": "number", "exclusiveMinimum": 0},
                "f_axial_khz": {"type": "number", "exclusiveMinimum": 0},
            },
            "required": ["f_radial_khz", "f_axial_khz"],
            "additionalProperties": False,
        },
        "sweep": {
            "type": "object",
            "properties": {
                "eta": {"type": "number", "exclusiveMinimum": 0},
                "f_axial_khz": {
                    "type": "array",
                    "items": {"type": "number", "exclusiveMinimum": 0},
                    "minItems": 1,
                },
            },
            "required": ["eta", "f_axial_khz"],
            "additionalProperties": False,
        },
        "transition": {
            "type": "object",
            "properties": {
                "interrogated": {"enum": ["a", "b"]},
                "initial": _STATE,
                "final": _STATE,
                "spectator": _STATE,
                "a_initial_a0": {"type": ["number", "null"]},
                "a_final_a0": {"type": ["number", "null"]},
            },
            "required": ["interrogated", "initial", "final", "spectator"],
            "additionalProperties": False,
        },
        "fit": {
            "type": "object",
            "properties": {
                "measurements_csv": {"type": "string"},
                "default_sigma_khz": {"type": "number", "exclusiveMinimum": 0},
                "bracket_a0": {
                    "type": "array",
                    "items": {"type": "number"},
                    "minItems": 2,
                    "maxItems": 2,
                },
            },
            "additionalProperties": False,
        },
        "synthesize": {
            "type": "object",
            "properties": {
                "a_true_a0": {"type": "number"},
                "sigma_khz": {"type": "number", "minimum": 0},
                "seed": {"type": "integer"},
            },
            "required": ["a_true_a0", "sigma_khz", "seed"],
            "additionalProperties": False,
        },
    },
    "additionalProperties": False,
}


@dataclass
class RunConfig:
    """Validated configuration with lazy object builders."""

    raw: dict

    # ----- builders -----
    def pair(self) -> SpeciesPair:
        sp = self.raw.get("species", {"atom1": "Rb87", "atom2": "Rb85"})
        return SpeciesPair(load_species(sp["atom1"]), load_species(sp["atom2"]))

    def scales(self):
        c6 = self.raw.get("c6_au", 4710.0)
        return vdw_scales(c6, self.pair().reduced_mass_u, self.raw.get("beta6_a0"))

    def defects(self, row: dict | None = None) -> mqdt.DefectSet:
        d = (row or {}).get("defects") or self.raw.get("defects")
        if d is None:
            raise ConfigError("no 'defects' section in config")
        return mqdt.DefectSet(d["mu_s_ei"], d["mu_t_ei"], d.get("mu_t_es"))

    def chi_map(self) -> dict:
        return {
            (o["f1"], o["mf1"], o["f2"], o["mf2"]): o["chi"]
            for o in self.raw.get("chi_overrides", [])
        }

    def class_overrides(self) -> dict:
        return {
            (o["s"], o["ms"], o["i"], o["mi"]): o["class"]
            for o in self.raw.get("class_overrides", [])
        }

    def transition(self) -> TransitionSpec:
        t = self.raw.get("transition")
        if t is None:
            raise ConfigError("no 'transition' section in config")
        return make_transition(
            self.pair(),
            t["interrogated"],
            tuple(t["initial"]),
            tuple(t["final"]),
            tuple(t["spectator"]),
            t.get("a_initial_a0"),
            t.get("a_final_a0"),
        )


def validate_config(raw: dict) -> RunConfig:
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(raw), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        where = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise ConfigError(f"config invalid at {where}: {e.message}")
    return RunConfig(raw=raw)


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from None
    return validate_config(raw)
