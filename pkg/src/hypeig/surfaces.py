"""Bundled surface presets and surface-file I/O.

The preset coordinates follow the two-vertex, three-edge gluing graph used
for all genus-2 examples (mw coordinates); lengths are kept as exact
expression strings and evaluated in extended precision on load.
"""

from __future__ import annotations

import json
from pathlib import Path

from .geometry import Curve, FenchelNielsen, GraphError
from .hypmath import parse_length_expr

MW_GRAPH = (
    ((0, 0), (1, 0), (2, 0)),
    ((0, 1), (1, 1), (2, 1)),
)

PRESETS: dict[str, dict] = {
    "bolza": {
        "genus": 2,
        "curves": [
            {"length": "2*acosh(3+2*sqrt(2))", "twist": 0.5},
            {"length": "2*acosh(1+sqrt(2))", "twist": 0.0},
            {"length": "2*acosh(1+sqrt(2))", "twist": 0.0},
        ],
        "pants": [[[0, 0], [1, 0], [2, 0]], [[0, 1], [1, 1], [2, 1]]],
    },
    "d6z2": {
        "genus": 2,
        "curves": [
            {"length": "2*acosh(2)", "twist": 0.0},
            {"length": "2*acosh(2)", "twist": 0.0},
            {"length": "2*acosh(2)", "twist": 0.0},
        ],
        "pants": [[[0, 0], [1, 0], [2, 0]], [[0, 1], [1, 1], [2, 1]]],
    },
    "z5z2": {
        "genus": 2,
        "curves": [
            {"length": "2*acosh((3+sqrt(5))/2)", "twist": 0.0},
            {"length": "2*acosh((1+sqrt(5))/2)", "twist": 0.5},
            {"length": "2*acosh((9+3*sqrt(5))/4)", "twist": 0.5},
        ],
        "pants": [[[0, 0], [1, 0], [2, 0]], [[0, 1], [1, 1], [2, 1]]],
    },
    "gutzwiller": {
        "genus": 2,
        "curves": [
            {"length": "4*acosh((sqrt(2)+1)/sqrt(2))", "twist": 0.25},
            {"length": "2*acosh((sqrt(2)+1)/sqrt(2))", "twist": 0.5},
            {"length": "2*acosh((sqrt(2)+1)/sqrt(2))", "twist": 0.5},
        ],
        "pants": [[[0, 0], [1, 0], [2, 0]], [[0, 1], [1, 1], [2, 1]]],
    },
    "aurich-steiner": {
        "genus": 2,
        "curves": [
            {"length": 3.717414183638, "twist": 0.0304758025243},
            {"length": 3.303402988815, "twist": 0.2711895405183},
            {"length": 3.408324727953, "twist": 0.2187479424048},
        ],
        "pants": [[[0, 0], [1, 0], [2, 0]], [[0, 1], [1, 1], [2, 1]]],
    },
    "rocha-pollicott-1": {
        "genus": 2,
        "curves": [
            {"length": 5.05, "twist": 0.0},
            {"length": 1.0, "twist": 0.0},
            {"length": 0.9, "twist": 0.0},
        ],
        "pants": [[[0, 0], [1, 0], [2, 0]], [[0, 1], [1, 1], [2, 1]]],
    },
    "rocha-pollicott-2": {
        "genus": 2,
        "curves": [
            {"length": 0.98, "twist": 0.0},
            {"length": 3.5, "twist": 0.0},
            {"length": 0.98, "twist": 0.0},
        ],
        "pants": [[[0, 0], [1, 0], [2, 0]], [[0, 1], [1, 1], [2, 1]]],
    },
    "rocha-pollicott-3": {
        "genus": 2,
        "curves": [
            {"length": 5.0, "twist": 0.0},
            {"length": 1.0, "twist": 0.0},
            {"length": 1.0, "twist": 0.0},
        ],
        "pants": [[[0, 0], [1, 0], [2, 0]], [[0, 1], [1, 1], [2, 1]]],
    },
    # double cover of the bolza surface, cut along its two short curves
    "genus3-double": {
        "genus": 3,
        "curves": [
            {"length": "2*acosh(3+2*sqrt(2))", "twist": 0.5},
            {"length": "2*acosh(3+2*sqrt(2))", "twist": 0.5},
            {"length": "2*acosh(1+sqrt(2))", "twist": 0.0},
            {"length": "2*acosh(1+sqrt(2))", "twist": 0.0},
            {"length": "2*acosh(1+sqrt(2))", "twist": 0.0},
            {"length": "2*acosh(1+sqrt(2))", "twist": 0.0},
        ],
        "pants": [
            [[0, 0], [2, 0], [3, 0]],
            [[0, 1], [4, 0], [5, 0]],
            [[1, 0], [2, 1], [3, 1]],
            [[1, 1], [4, 1], [5, 1]],
        ],
    },
}


def fn_from_dict(doc: dict) -> FenchelNielsen:
    try:
        genus = int(doc["genus"])
        curves = tuple(
            Curve(length=parse_length_expr(c["length"]), twist=float(c.get("twist", 0.0)))
            for c in doc["curves"]
        )
        pants = tuple(
            tuple((int(e[0]) if not isinstance(e, dict) else int(e["curve"]),
                   int(e[1]) if not isinstance(e, dict) else int(e["end"])) for e in ends)
            for ends in doc["pants"]
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise GraphError(f"malformed surface description: {exc}") from exc
    fn = FenchelNielsen(genus=genus, curves=curves, pants=pants)
    fn.validate()
    return fn


def load_surface(path_or_name: str) -> FenchelNielsen:
    name = str(path_or_name)
    if name in PRESETS:
        return fn_from_dict(PRESETS[name])
    path = Path(name)
    with path.open() as f:
        return fn_from_dict(json.load(f))


def data_file(name: str) -> Path:
    return Path(__file__).parent / "data" / name
