"""
Named objects and JSON persistence.

Commands take either a corpus name or a path to a JSON file for each input.
"""

import json
import logging
import os
import random
from typing import Any, Callable, Dict, List, Tuple

import config
from adc import Adc, BasisConditions, ChainMap, globe_adc, oriental2_adc, path_adc, point_adc, tensor
from doublecat import CompanionTriple, FiniteDoubleCat, double_from_dict, double_to_dict, vertical_double
from errors import CorpusError, GraycatError
from graymaps import DecompositionWitness
from reports import Report
from strictcat import (
    CatFunctor, FiniteStrictNCat, category_from_dict, category_to_dict, enumerate_functors,
    from_nu, poset_category, terminal_category, walking_iso,
)
from squarecech import Filtration2, sq2, truncation_pair
from theta import POINT, GlobularSum, globe, node, path, sum_from_json, sum_to_json

logger = logging.getLogger(__name__)


def isocell() -> FiniteStrictNCat:
    """Parallel 1-cells f, g: 0 → 1 joined by inverse 2-cells s: f ⇒ g and t: g ⇒ f."""
    arrows = {"id0": ("0", "0"), "id1": ("1", "1"), "f": ("0", "1"), "g": ("0", "1")}
    faces = {f"I{c}": (c, c) for c in arrows}
    faces.update({"s": ("f", "g"), "t": ("g", "f")})
    boundary = dict(arrows)
    boundary.update(faces)
    identity = {"0": "id0", "1": "id1"}
    identity.update({c: f"I{c}" for c in arrows})
    composition = {(0, "id0", "id0"): "id0", (0, "id1", "id1"): "id1"}
    for c in ("f", "g"):
        composition[(0, "id0", c)] = c
        composition[(0, c, "id1")] = c
    for theta, (p, q) in faces.items():
        s, t = arrows[p]
        composition[(0, f"Iid{s}", theta)] = theta
        composition[(0, theta, f"Iid{t}")] = theta
        composition[(1, f"I{p}", theta)] = theta
        composition[(1, theta, f"I{q}")] = theta
    composition[(1, "s", "t")] = "If"
    composition[(1, "t", "s")] = "Ig"
    return FiniteStrictNCat(2, {0: ["0", "1"], 1: list(arrows), 2: list(faces)}, boundary, identity,
                            composition, name="isocell")


ADCS: Dict[str, Callable[[], Adc]] = {
    "point": point_adc,
    "interval": lambda: path_adc(1),
    "path2": lambda: path_adc(2),
    "globe0": lambda: globe_adc(0),
    "globe1": lambda: globe_adc(1),
    "globe2": lambda: globe_adc(2),
    "globe3": lambda: globe_adc(3),
    "simplex2": oriental2_adc,
    "walking2cell": lambda: globe_adc(2),
    "gridsquare": lambda: tensor(path_adc(1), path_adc(1)),
}

SUMS: Dict[str, Callable[[], GlobularSum]] = {
    "point": lambda: POINT,
    "interval": lambda: path(1),
    "path2": lambda: path(2),
    "path3": lambda: path(3),
    "globe1": lambda: globe(1),
    "globe2": lambda: globe(2),
    "globe3": lambda: globe(3),
    "whisker": lambda: node([globe(1), POINT]),
    "twoglobes": lambda: node([globe(1), globe(1)]),
}

CATEGORIES: Dict[str, Callable[[], FiniteStrictNCat]] = {
    "terminal": lambda: terminal_category(1),
    "interval": lambda: poset_category(1),
    "poset2": lambda: poset_category(2),
    "simplex2": lambda: from_nu(oriental2_adc(), 2),
    "walking2cell": lambda: from_nu(globe_adc(2), 2),
    "gridsquare": lambda: from_nu(tensor(path_adc(1), path_adc(1)), 2),
    "walkingiso": walking_iso,
    "isocell": isocell,
}

# Categories without non-identity invertible cells above dimension 1
STRICT_IMAGE_CATEGORIES = ("terminal", "interval", "poset2", "simplex2", "walking2cell", "gridsquare", "walkingiso")

# Small enough for exhaustive double functor searches
TINY_CATEGORIES = ("terminal", "interval", "walking2cell")


def _is_file(token: str) -> bool:
    return token.endswith(".json") or os.path.sep in token


def load_json(path: str) -> Any:
    """
    Raises:
        CorpusError: If the file is missing
        json.JSONDecodeError: If the file is not JSON
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except FileNotFoundError:
        raise CorpusError(f"no such file: {path}")


def saved_path(name: str) -> str:
    """The file a result saved under name goes to: name itself when it is a path,
    otherwise <name>.json in the corpus directory.
    """
    if _is_file(name):
        return name
    return os.path.join(config.get_corpus_dir(), f"{name}.json")


def _resolve(token: str, table: Dict[str, Callable], kind: str, parse: Callable[[Any], Any]):
    if token in table:
        value = table[token]()
        logger.debug("resolved %s %s from the corpus", kind, token)
        return value
    if _is_file(token):
        return parse(load_json(token))
    saved = saved_path(token)
    if os.path.exists(saved):
        logger.debug("resolved %s %s from %s", kind, token, saved)
        return parse(load_json(saved))
    raise CorpusError(f"unknown {kind} {token!r}; known names: {', '.join(sorted(table))}")


def resolve_adc(token: str) -> Adc:
    return _resolve(token, ADCS, "complex", Adc.from_dict)


def resolve_sum(token: str) -> GlobularSum:
    return _resolve(token, SUMS, "globular sum", sum_from_json)


def resolve_category(token: str) -> FiniteStrictNCat:
    return _resolve(token, CATEGORIES, "category", category_from_dict)


def resolve_double(token: str) -> FiniteDoubleCat:
    """A JSON file, or "sq2:<category>" / "vertical:<category>" built from a corpus category."""
    kind, _, rest = token.partition(":")
    if rest and kind in ("sq2", "vertical"):
        c = resolve_category(rest)
        return sq2(c) if kind == "sq2" else vertical_double(c)
    if _is_file(token) or os.path.exists(saved_path(token)):
        return double_from_dict(load_json(saved_path(token)))
    raise CorpusError(f"unknown double category {token!r}; use sq2:<category>, vertical:<category> or a JSON file")


def filtration_from_dict(data: Any) -> Filtration2:
    """{"name", "a0", "a1", "map"} with both categories as category documents."""
    try:
        a0, a1 = category_from_dict(data["a0"]), category_from_dict(data["a1"])
        return Filtration2(a0, a1, CatFunctor(a0, a1, data["map"]), name=data.get("name", ""))
    except (KeyError, TypeError) as e:
        raise CorpusError(f"malformed filtration document: {e}")


def resolve_filtration(token: str) -> Filtration2:
    """A JSON file, or "truncation:<category>" for τ≤1(c) ⊂ c."""
    kind, _, rest = token.partition(":")
    if rest and kind == "truncation":
        return truncation_pair(resolve_category(rest))
    if _is_file(token) or os.path.exists(saved_path(token)):
        return filtration_from_dict(load_json(saved_path(token)))
    raise CorpusError(f"unknown filtration {token!r}; use truncation:<category> or a JSON file")


def to_json(value: Any) -> Any:
    """The JSON document of any value graycat reads or writes."""
    if value is None or isinstance(value, (bool, int, float, str)):
        return value
    if isinstance(value, dict):
        return {str(k): to_json(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_json(v) for v in value]
    if isinstance(value, Adc):
        return value.to_dict()
    if isinstance(value, GlobularSum):
        return sum_to_json(value)
    if isinstance(value, FiniteStrictNCat):
        return category_to_dict(value)
    if isinstance(value, FiniteDoubleCat):
        return double_to_dict(value)
    if isinstance(value, (ChainMap, Report, DecompositionWitness, BasisConditions, CompanionTriple)):
        return value.to_dict()
    if isinstance(value, CatFunctor):
        return {str(x): str(y) for x, y in value.mapping.items()}
    raise GraycatError(f"cannot write a {type(value).__name__} as JSON")


def dumps(value: Any) -> str:
    return json.dumps(to_json(value), ensure_ascii=False, indent=2, sort_keys=True)


def save_json(value: Any, path: str) -> str:
    """Write value to path and return the path."""
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(dumps(value))
        f.write("\n")
    logger.info("saved %s to %s", type(value).__name__, path)
    return path


def random_functors(seed: int, count: int, names: Tuple[str, ...] = ("terminal", "interval", "poset2", "walkingiso"),
                    budget: int = None) -> List[CatFunctor]:
    """Draw functors between tiny corpus categories from a seeded generator."""
    rng = random.Random(seed)
    categories = {name: CATEGORIES[name]() for name in names}
    pools = {}
    for a in names:
        for b in names:
            functors = enumerate_functors(categories[a], categories[b], budget)
            if functors:
                pools[(a, b)] = functors
    keys = sorted(pools)
    drawn = []
    for _ in range(count):
        key = rng.choice(keys)
        functor = rng.choice(pools[key])
        functor.name = f"{key[0]}→{key[1]}"
        drawn.append(functor)
    return drawn
