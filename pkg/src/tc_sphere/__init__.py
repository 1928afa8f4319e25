"""Exact bounds and motion planners for sequential parametrized TC of sphere bundles."""

from __future__ import annotations

import json
from importlib import resources

from .bundles import BundleSpec, parse_spec
from .graded_ring import CoefficientRing, GradedClass, RingModel, height, relative_height
from .spaces import BaseSpace
from .tc_bounds import BoundReport, evaluate

__version__ = "0.1.0"

__all__ = [
    "BaseSpace",
    "BoundReport",
    "BundleSpec",
    "CoefficientRing",
    "GradedClass",
    "RingModel",
    "evaluate",
    "height",
    "load_schema",
    "parse_spec",
    "relative_height",
]


def load_schema(name: str) -> dict:
    """Shipped JSON schema, e.g. ``load_schema("bound_report")``."""
    text = resources.files(__name__).joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)
