"""Python access to the deftop engine.

Specs are passed as source text. Rationals and sets come back as strings in
the same notation the command line tool prints.
"""

import json
from pathlib import Path

from . import _core
from ._core import DomainError, Error, ParseError

__all__ = [
    "DomainError",
    "Error",
    "ParseError",
    "analyze",
    "closure",
    "embed",
    "load",
    "normalize_source",
    "oracle",
    "random_spec",
    "shadow_map",
    "shadows_at",
    "validate",
]


def load(path):
    return Path(path).read_text()


def validate(text):
    return json.loads(_core.validate(text))


def normalize_source(text):
    return _core.normalize_source(text)


def analyze(text, with_components=True, depth=12):
    return json.loads(_core.analyze(text, with_components, depth))


def shadows_at(text, at):
    return _core.shadows_at(text, str(at))


def shadow_map(text):
    return json.loads(_core.shadow_map(text))


def closure(text, subset):
    return _core.closure(text, subset)


def embed(text, depth=12):
    return json.loads(_core.embed(text, depth))


def oracle(text, resolution=8, depth=12, seed=0):
    return json.loads(_core.oracle(text, resolution, depth, seed))


def random_spec(seed, max_cells=4, max_pieces=3):
    return _core.random_spec(seed, max_cells, max_pieces)
