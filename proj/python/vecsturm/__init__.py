"""Eigenvalues, eigenfunctions and Riesz-basis diagnostics for -y'' + Q(x) y on [0, 1]
with an m x m complex potential and strongly regular boundary conditions."""

import json

from ._core import (
    Boundary,
    Potential,
    VecsturmError,
    base_spectrum,
    characteristic_det,
    oracle,
    run_stage,
    solve,
)

__all__ = [
    "Boundary",
    "Potential",
    "VecsturmError",
    "base_spectrum",
    "boundary_from_records",
    "characteristic_det",
    "oracle",
    "potential_from_spec",
    "run_stage",
    "solve",
]


def boundary_from_records(records):
    """Two {k, alpha, alpha0, beta, beta0} records, complex values as [re, im]."""
    return Boundary._from_json(json.dumps(list(records)))


def potential_from_spec(spec):
    """A potential spec as in the config file, e.g. {"type": "trig", "m": 2, "harmonics": [...]}."""
    return Potential._from_json(json.dumps(spec))
