"""Geodesically equivalent metric pairs."""

import json as _json

from ._core import (
    ConvergenceError,
    DomainError,
    GeodeqError,
    MetricPair,
    SingularError,
    SpecError,
    SpectralError,
    char_poly,
    geodesic,
    glue,
    integral,
    load_scene,
    pair_from_json,
    run_cli,
    split,
    verify,
)


def pair(spec):
    """Build a pair from a scene dict, a construction dict, or JSON text."""
    return pair_from_json(spec if isinstance(spec, str) else _json.dumps(spec))


__all__ = [
    "ConvergenceError", "DomainError", "GeodeqError", "MetricPair", "SingularError", "SpecError",
    "SpectralError", "char_poly", "geodesic", "glue", "integral", "load_scene", "pair",
    "pair_from_json", "run_cli", "split", "verify",
]
