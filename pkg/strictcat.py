"""
Finite strict n-categories (n ≤ 3) with explicit composition tables.

Cells are hashable labels. Every cell of dimension d ≥ 1 has an immediate
source and target; higher boundaries are read off by iteration. Compositions
are stored diagrammatically: composition[(i, a, b)] is a ∘_i b, "a then b",
defined when the i-target of a is the i-source of b. Both cells of a table
entry have the same dimension; lower cells are whiskered in through their
iterated identities.
"""

import itertools
import logging
from collections import defaultdict
from typing import Any, Dict, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple

import networkx as nx

import config
from adc import Adc, ChainMap, NuCell, nu_cells, nu_compose
from errors import InvalidCategoryError, NotComposableError
from reports import Report

logger = logging.getLogger(__name__)

Label = Hashable


class FiniteStrictNCat:
    """A finite strict max_dim-category.

    Args:
        max_dim: Top dimension (0 to 3)
        cells: Labels per dimension
        boundary: (source, target) of every cell of positive dimension
        identity: Identity (d+1)-cell of every d-cell with d < max_dim
        composition: (i, a, b) → a ∘_i b on composable pairs of equal dimension
        name: Display name
    """

    def __init__(self, max_dim: int, cells: Mapping[int, Sequence[Label]],
                 boundary: Mapping[Label, Tuple[Label, Label]],
                 identity: Mapping[Label, Label],
                 composition: Mapping[Tuple[int, Label, Label], Label],
                 name: str = ""):
        if not 0 <= max_dim <= config.MAX_CATEGORY_DIM:
            raise InvalidCategoryError(f"max_dim must be between 0 and {config.MAX_CATEGORY_DIM}, got {max_dim}")
        self.max_dim = max_dim
        self.name = name
        self._cells = {d: tuple(cells.get(d, ())) for d in range(max_dim + 1)}
        self._dim: Dict[Label, int] = {}
        for d, labels in self._cells.items():
            for x in labels:
                if x in self._dim:
                    raise InvalidCategoryError(f"cell {x!r} listed twice")
                self._dim[x] = d
        extra = set(cells) - set(self._cells)
        if any(cells[d] for d in extra):
            raise InvalidCategoryError(f"cells listed above max_dim {max_dim}")

        self._boundary = dict(boundary)
        for x, d in self._dim.items():
            if d == 0:
                continue
            if x not in self._boundary:
                raise InvalidCategoryError(f"{d}-cell {x!r} has no boundary")
            for y in self._boundary[x]:
                if self._dim.get(y) != d - 1:
                    raise InvalidCategoryError(f"boundary {y!r} of {x!r} is not a {d - 1}-cell")
        self._identity = dict(identity)
        for x, y in self._identity.items():
            if self._dim.get(y) != self._dim.get(x, -2) + 1:
                raise InvalidCategoryError(f"identity of {x!r} is not a cell one dimension up")
        self._composition = dict(composition)
        for (i, a, b), c in self._composition.items():
            dims = {self._dim.get(a), self._dim.get(b), self._dim.get(c)}
            if len(dims) != 1 or None in dims or not 0 <= i < dims.pop():
                raise InvalidCategoryError(f"composition entry ({i}, {a!r}, {b!r}) → {c!r} is malformed")

    # -- structure -------------------------------------------------------

    def cells(self, d: int) -> Tuple[Label, ...]:
        return self._cells.get(d, ())

    @property
    def objects(self) -> Tuple[Label, ...]:
        return self._cells[0]

    def all_cells(self) -> List[Label]:
        return [x for d in range(self.max_dim + 1) for x in self._cells[d]]

    def __contains__(self, x: Label) -> bool:
        return x in self._dim

    def dim(self, x: Label) -> int:
        try:
            return self._dim[x]
        except KeyError:
            raise InvalidCategoryError(f"{x!r} is not a cell of {self.name or 'the category'}")

    def src(self, x: Label) -> Label:
        return self._boundary[x][0]

    def tgt(self, x: Label) -> Label:
        return self._boundary[x][1]

    def source(self, x: Label, k: int) -> Label:
        """π_k^-(x), the iterated source of x in dimension k."""
        while self.dim(x) > k:
            x = self.src(x)
        return x

    def target(self, x: Label, k: int) -> Label:
        while self.dim(x) > k:
            x = self.tgt(x)
        return x

    def identity(self, x: Label) -> Label:
        try:
            return self._identity[x]
        except KeyError:
            raise InvalidCategoryError(f"{x!r} has no identity in a {self.max_dim}-category")

    def iterated_identity(self, x: Label, d: int) -> Label:
        while self.dim(x) < d:
            x = self.identity(x)
        return x

    def is_identity(self, x: Label) -> bool:
        return self.dim(x) > 0 and self._identity.get(self.src(x)) == x

    def composition_table(self) -> Dict[Tuple[int, Label, Label], Label]:
        return dict(self._composition)

    def identity_table(self) -> Dict[Label, Label]:
        return dict(self._identity)

    def boundary_table(self) -> Dict[Label, Tuple[Label, Label]]:
        return dict(self._boundary)

    def composable(self, a: Label, b: Label, i: int) -> bool:
        return i < min(self.dim(a), self.dim(b)) and self.target(a, i) == self.source(b, i)

    def compose(self, a: Label, b: Label, i: int) -> Label:
        """a ∘_i b, whiskering the lower-dimensional cell through identities.

        Raises:
            NotComposableError: If the i-target of a is not the i-source of b
        """
        if not self.composable(a, b, i):
            raise NotComposableError(f"{a!r} and {b!r} do not meet along dimension {i}")
        d = max(self.dim(a), self.dim(b))
        a, b = self.iterated_identity(a, d), self.iterated_identity(b, d)
        try:
            return self._composition[(i, a, b)]
        except KeyError:
            raise InvalidCategoryError(f"composition table has no entry for ({i}, {a!r}, {b!r})")

    def nondegenerate_counts(self) -> Tuple[int, ...]:
        return tuple(sum(1 for x in self.cells(d) if not self.is_identity(x)) for d in range(self.max_dim + 1))

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiniteStrictNCat):
            return NotImplemented
        return (self.max_dim == other.max_dim
                and all(set(self.cells(d)) == set(other.cells(d)) for d in range(self.max_dim + 1))
                and self._boundary == other._boundary
                and self._identity == other._identity
                and self._composition == other._composition)

    def __hash__(self) -> int:
        return hash((self.max_dim, tuple(len(self.cells(d)) for d in range(self.max_dim + 1))))

    def __repr__(self) -> str:
        return f"<FiniteStrictNCat {self.name or ''} sizes {[len(self.cells(d)) for d in range(self.max_dim + 1)]}>"


def _composable_pairs(c: FiniteStrictNCat, d: int, i: int) -> Iterable[Tuple[Label, Label]]:
    by_source = defaultdict(list)
    for b in c.cells(d):
        by_source[c.source(b, i)].append(b)
    for a in c.cells(d):
        for b in by_source.get(c.target(a, i), ()):
            yield a, b


def validate_category(c: FiniteStrictNCat) -> Report:
    """Check globularity, identities, totality of the tables, units, associativity,
    interchange and functoriality of identities.

    Returns:
        Report with one violation per failing instance
    """
    report = Report(f"category {c.name}".strip())

    for d in range(2, c.max_dim + 1):
        for x in c.cells(d):
            if c.src(c.src(x)) != c.src(c.tgt(x)) or c.tgt(c.src(x)) != c.tgt(c.tgt(x)):
                report.add(x, "globularity", "source and target are not parallel")

    for d in range(c.max_dim):
        for x in c.cells(d):
            ident = c._identity.get(x)
            if ident is None:
                report.add(x, "identities", "missing identity")
            elif c.src(ident) != x or c.tgt(ident) != x:
                report.add(x, "identities", f"identity {ident!r} has the wrong boundary")
    if not report.ok:
        return report

    def safe(a, b, i):
        try:
            return c.compose(a, b, i)
        except (InvalidCategoryError, NotComposableError):
            return None

    for (i, a, b), value in c._composition.items():
        if not c.composable(a, b, i):
            report.add((i, a, b), "totality", "entry for a pair that does not compose")

    for d in range(1, c.max_dim + 1):
        for i in range(d):
            pairs = list(_composable_pairs(c, d, i))
            for a, b in pairs:
                value = c._composition.get((i, a, b))
                if value is None:
                    report.add((i, a, b), "totality", "missing composite")
                    continue
                for j in range(d):
                    if j < i:
                        expected = (c.source(a, j), c.target(a, j))
                    elif j == i:
                        expected = (c.source(a, j), c.target(b, j))
                    else:
                        expected = (safe(c.source(a, j), c.source(b, j), i), safe(c.target(a, j), c.target(b, j), i))
                    if (c.source(value, j), c.target(value, j)) != expected:
                        report.add((i, a, b), "boundaries", f"{j}-boundary of the composite is wrong")
                        break
            for a in c.cells(d):
                left = c.iterated_identity(c.source(a, i), d)
                right = c.iterated_identity(c.target(a, i), d)
                if safe(left, a, i) != a or safe(a, right, i) != a:
                    report.add((i, a), "units", f"identity of the {i}-boundary is not a unit")
            by_source = defaultdict(list)
            for a, b in pairs:
                by_source[a].append(b)
            for a, b in pairs:
                ab = c._composition.get((i, a, b))
                for e in by_source.get(b, ()):
                    be = c._composition.get((i, b, e))
                    if ab is None or be is None:
                        continue
                    if safe(ab, e, i) != safe(a, be, i):
                        report.add((i, a, b, e), "associativity", "bracketings differ")

        for i in range(1, d):
            pairs = list(_composable_pairs(c, d, i))
            for j in range(i):
                for (a, b), (x, y) in itertools.product(pairs, repeat=2):
                    if not (c.composable(a, x, j) and c.composable(b, y, j)):
                        continue
                    left = safe(safe(a, b, i), safe(x, y, i), j)
                    right = safe(safe(a, x, j), safe(b, y, j), i)
                    if left is not None and right is not None and left != right:
                        report.add((a, b, x, y), "interchange", f"∘{i} and ∘{j} do not interchange")

    for d in range(1, c.max_dim):
        for i in range(d):
            for a, b in _composable_pairs(c, d, i):
                ab = c._composition.get((i, a, b))
                if ab is None:
                    continue
                if safe(c.identity(a), c.identity(b), i) != c.identity(ab):
                    report.add((i, a, b), "identity-functoriality", "identity of a composite is not the composite of identities")

    report.facts["cells"] = [len(c.cells(d)) for d in range(c.max_dim + 1)]
    return report


# -- constructions -------------------------------------------------------

def from_nu(adc: Adc, max_dim: int, coeff_cap: Optional[int] = None,
            budget: Optional[int] = None) -> FiniteStrictNCat:
    """The strict category of nu cells of an atomic loop-free complex.

    Cells are labelled by their printed tables.

    Raises:
        InvalidCategoryError: If a composite falls outside the enumerated cells
    """
    nu = nu_cells(adc, max_dim, coeff_cap, budget)
    label = {(x.dimension, x.table): str(x) for x in nu}
    cells: Dict[int, List[str]] = defaultdict(list)
    boundary, identity, composition = {}, {}, {}
    for x in nu:
        cells[x.dimension].append(str(x))
        if x.dimension > 0:
            boundary[str(x)] = (str(x.source()), str(x.target()))
        if x.dimension < max_dim:
            identity[str(x)] = str(x.identity())
    by_dim: Dict[int, List[NuCell]] = defaultdict(list)
    for x in nu:
        by_dim[x.dimension].append(x)
    for d in range(1, max_dim + 1):
        for i in range(d):
            by_source = defaultdict(list)
            for y in by_dim[d]:
                by_source[(y.table[:i], y.minus(i))].append(y)
            for x in by_dim[d]:
                for y in by_source.get((x.table[:i], x.plus(i)), ()):
                    z = nu_compose(x, y, i)
                    key = (z.dimension, z.table)
                    if key not in label:
                        raise InvalidCategoryError(f"composite {z} of {x} and {y} exceeds the coefficient cap")
                    composition[(i, str(x), str(y))] = label[key]
    logger.info("nu category of %s: %s cells", adc.name, [len(cells[d]) for d in range(max_dim + 1)])
    return FiniteStrictNCat(max_dim, cells, boundary, identity, composition, name=f"ν({adc.name})")


def poset_category(n: int, max_dim: int = 1) -> FiniteStrictNCat:
    """The poset [n] with arrows "i→j" for i ≤ j."""
    objects = [str(i) for i in range(n + 1)]
    arrows = [f"{i}→{j}" for i in range(n + 1) for j in range(i, n + 1)]
    boundary = {f"{i}→{j}": (str(i), str(j)) for i in range(n + 1) for j in range(i, n + 1)}
    identity = {str(i): f"{i}→{i}" for i in range(n + 1)}
    composition = {
        (0, f"{i}→{j}", f"{j}→{k}"): f"{i}→{k}"
        for i in range(n + 1) for j in range(i, n + 1) for k in range(j, n + 1)
    }
    poset = FiniteStrictNCat(1, {0: objects, 1: arrows}, boundary, identity, composition, name=f"[{n}]")
    if max_dim == 0:
        if n > 0:
            raise InvalidCategoryError("a poset with arrows needs max_dim ≥ 1")
        return discrete_category(objects, name="[0]")
    return promote(poset, max_dim)


def discrete_category(objects: Sequence[Label], max_dim: int = 0, name: str = "") -> FiniteStrictNCat:
    return promote(FiniteStrictNCat(0, {0: list(objects)}, {}, {}, {}, name=name), max_dim)


def terminal_category(max_dim: int = 0) -> FiniteStrictNCat:
    return discrete_category(["*"], max_dim, name="terminal")


def walking_iso() -> FiniteStrictNCat:
    """Objects 0, 1 with mutually inverse arrows u: 0 → 1 and v: 1 → 0."""
    boundary = {"id0": ("0", "0"), "id1": ("1", "1"), "u": ("0", "1"), "v": ("1", "0")}
    composition = {
        (0, "id0", "id0"): "id0", (0, "id1", "id1"): "id1",
        (0, "id0", "u"): "u", (0, "u", "id1"): "u",
        (0, "id1", "v"): "v", (0, "v", "id0"): "v",
        (0, "u", "v"): "id0", (0, "v", "u"): "id1",
    }
    return FiniteStrictNCat(1, {0: ["0", "1"], 1: ["id0", "id1", "u", "v"]}, boundary,
                            {"0": "id0", "1": "id1"}, composition, name="walking iso")


def promote(c: FiniteStrictNCat, max_dim: int) -> FiniteStrictNCat:
    """Regard c as a max_dim-category by adding identity cells ("id", x) on top."""
    if max_dim <= c.max_dim:
        return c
    cells = {d: list(c.cells(d)) for d in range(c.max_dim + 1)}
    boundary = c.boundary_table()
    identity = c.identity_table()
    composition = c.composition_table()
    for d in range(c.max_dim, max_dim):
        cells[d + 1] = []
        for x in cells[d]:
            ident = ("id", x)
            cells[d + 1].append(ident)
            boundary[ident] = (x, x)
            identity[x] = ident
        level = set(cells[d])
        for (i, a, b), value in list(composition.items()):
            if i < d and a in level and b in level:
                composition[(i, identity[a], identity[b])] = identity[value]
        for x in cells[d]:
            composition[(d, identity[x], identity[x])] = identity[x]
    return FiniteStrictNCat(max_dim, cells, boundary, identity, composition, name=c.name)


def truncate(c: FiniteStrictNCat, k: int) -> FiniteStrictNCat:
    """Forget the cells above dimension k."""
    if not 0 <= k < c.max_dim:
        raise InvalidCategoryError(f"cannot truncate a {c.max_dim}-category at {k}")
    cells = {d: c.cells(d) for d in range(k + 1)}
    keep = set(itertools.chain.from_iterable(cells.values()))
    return FiniteStrictNCat(
        k, cells,
        {x: b for x, b in c.boundary_table().items() if x in keep},
        {x: y for x, y in c.identity_table().items() if y in keep},
        {key: v for key, v in c.composition_table().items() if v in keep},
        name=f"τ≤{k}({c.name})" if c.name else "",
    )


def itruncate(c: FiniteStrictNCat, k: int) -> FiniteStrictNCat:
    """Identify k-cells joined by a zig-zag of (k+1)-cells and drop everything above k.

    Raises:
        InvalidCategoryError: If the identification does not respect composition
    """
    if not 0 <= k < c.max_dim:
        raise InvalidCategoryError(f"cannot truncate a {c.max_dim}-category at {k}")
    graph = nx.Graph()
    graph.add_nodes_from(c.cells(k))
    for x in c.cells(k + 1):
        graph.add_edge(c.src(x), c.tgt(x))
    order = {x: n for n, x in enumerate(c.cells(k))}
    rep = {}
    for component in nx.connected_components(graph):
        leader = min(component, key=order.__getitem__)
        for x in component:
            rep[x] = leader
    for d in range(k):
        for x in c.cells(d):
            rep[x] = x

    cells = {d: list(c.cells(d)) for d in range(k)}
    cells[k] = [x for x in c.cells(k) if rep[x] == x]
    boundary = {x: (rep[s], rep[t]) for x, (s, t) in c.boundary_table().items() if c.dim(x) <= k and rep[x] == x}
    identity = {x: rep[y] for x, y in c.identity_table().items() if c.dim(x) < k}
    composition = {}
    for (i, a, b), value in c.composition_table().items():
        if c.dim(a) > k:
            continue
        key = (i, rep[a], rep[b])
        if composition.setdefault(key, rep[value]) != rep[value]:
            raise InvalidCategoryError(f"identification at {k} does not respect ∘{i} on {a!r}, {b!r}")
    return FiniteStrictNCat(k, cells, boundary, identity, composition,
                            name=f"h≤{k}({c.name})" if c.name else "")


def hom_cat(c: FiniteStrictNCat, a: Label, b: Label) -> FiniteStrictNCat:
    """hom_C(a, b): its k-cells are the (k+1)-cells of c from a to b."""
    if c.dim(a) != 0 or c.dim(b) != 0:
        raise InvalidCategoryError("hom categories are taken between objects")
    if c.max_dim == 0:
        objects = [("id", a)] if a == b else []
        return FiniteStrictNCat(0, {0: objects}, {}, {}, {}, name=f"hom({a},{b})")
    inside = {x for d in range(1, c.max_dim + 1) for x in c.cells(d)
              if c.source(x, 0) == a and c.target(x, 0) == b}
    cells = {d - 1: [x for x in c.cells(d) if x in inside] for d in range(1, c.max_dim + 1)}
    boundary = {x: bd for x, bd in c.boundary_table().items() if x in inside and c.dim(x) > 1}
    identity = {x: y for x, y in c.identity_table().items() if x in inside}
    composition = {(i - 1, p, q): v for (i, p, q), v in c.composition_table().items() if i > 0 and p in inside}
    return FiniteStrictNCat(c.max_dim - 1, cells, boundary, identity, composition, name=f"hom({a},{b})")


def category_to_dict(c: FiniteStrictNCat) -> Dict[str, Any]:
    """JSON document; labels are written with str()."""
    return {
        "name": c.name,
        "max_dim": c.max_dim,
        "cells": [[str(x) for x in c.cells(d)] for d in range(c.max_dim + 1)],
        "boundary": {str(x): [str(s), str(t)] for x, (s, t) in c.boundary_table().items()},
        "identity": {str(x): str(y) for x, y in c.identity_table().items()},
        "composition": [[i, str(a), str(b), str(v)] for (i, a, b), v in c.composition_table().items()],
    }


def category_from_dict(data: Mapping[str, Any]) -> FiniteStrictNCat:
    try:
        cells = {d: labels for d, labels in enumerate(data["cells"])}
        return FiniteStrictNCat(
            data["max_dim"], cells,
            {x: tuple(bd) for x, bd in data.get("boundary", {}).items()},
            data.get("identity", {}),
            {(i, a, b): v for i, a, b, v in data.get("composition", [])},
            name=data.get("name", ""),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise InvalidCategoryError(f"malformed category document: {e}")


# -- functors ------------------------------------------------------------------

class CatFunctor:
    """A strict functor given by its action on cells."""

    def __init__(self, source: FiniteStrictNCat, target: FiniteStrictNCat,
                 mapping: Mapping[Label, Label], name: str = ""):
        self.source = source
        self.target = target
        self.mapping = dict(mapping)
        self.name = name

    def __call__(self, x: Label) -> Label:
        return self.mapping[x]

    def violations(self) -> Report:
        report = Report(f"functor {self.name}".strip())
        s, t = self.source, self.target
        for x in s.all_cells():
            y = self.mapping.get(x)
            if y is None or y not in t or t.dim(y) != s.dim(x):
                report.add(x, "total", f"sent to {y!r}")
        if not report.ok:
            return report
        for x in s.all_cells():
            if s.dim(x) > 0 and (t.src(self(x)), t.tgt(self(x))) != (self(s.src(x)), self(s.tgt(x))):
                report.add(x, "boundary", "boundary not preserved")
            if s.dim(x) < s.max_dim:
                if s.dim(x) >= t.max_dim or t.identity(self(x)) != self(s.identity(x)):
                    report.add(x, "identity", "identity not preserved")
        for (i, a, b), value in s.composition_table().items():
            try:
                if t.compose(self(a), self(b), i) != self(value):
                    report.add((i, a, b), "composition", "composite not preserved")
            except (NotComposableError, InvalidCategoryError) as e:
                report.add((i, a, b), "composition", str(e))
        return report

    def is_valid(self) -> bool:
        return self.violations().ok

    def then(self, other: "CatFunctor") -> "CatFunctor":
        return CatFunctor(self.source, other.target, {x: other(y) for x, y in self.mapping.items()})

    def is_isomorphism(self) -> bool:
        if self.source.max_dim != self.target.max_dim or not self.is_valid():
            return False
        for d in range(self.source.max_dim + 1):
            images = {self(x) for x in self.source.cells(d)}
            if len(images) != len(self.source.cells(d)) or images != set(self.target.cells(d)):
                return False
        return True

    def __eq__(self, other) -> bool:
        if not isinstance(other, CatFunctor):
            return NotImplemented
        return self.source == other.source and self.target == other.target and self.mapping == other.mapping

    def __hash__(self) -> int:
        return hash(frozenset(self.mapping.items()))

    def __repr__(self) -> str:
        return f"<CatFunctor {self.name or ''} {self.source.name} → {self.target.name}>"


def identity_functor(c: FiniteStrictNCat) -> CatFunctor:
    return CatFunctor(c, c, {x: x for x in c.all_cells()}, name="id")


def promote_functor(f: CatFunctor, max_dim: int) -> CatFunctor:
    """f between the promotions of its source and target."""
    source, target = promote(f.source, max_dim), promote(f.target, max_dim)
    mapping = dict(f.mapping)
    for d in range(max_dim + 1):
        for x in source.cells(d):
            if x not in mapping:
                mapping[x] = target.identity(mapping[source.src(x)])
    return CatFunctor(source, target, mapping, name=f.name)


def _aligned(f: CatFunctor) -> CatFunctor:
    top = max(f.source.max_dim, f.target.max_dim)
    return promote_functor(f, top) if f.source.max_dim != f.target.max_dim else f


def _decomposable(c: FiniteStrictNCat) -> set:
    found = set()
    for (i, a, b), value in c.composition_table().items():
        if a != value and b != value:
            found.add(value)
    return found


def enumerate_functors(c: FiniteStrictNCat, d: FiniteStrictNCat,
                       budget: Optional[int] = None) -> List[CatFunctor]:
    """All strict functors c → d, in a deterministic order.

    Cells are assigned dimension by dimension. A cell whose image is forced by
    identities or compositions of assigned cells is propagated; the others are
    branched over the target cells with matching boundary.

    Raises:
        BudgetExceededError: If the search exceeds its budget
    """
    if d.max_dim < c.max_dim:
        d = promote(d, c.max_dim)
    counter = config.SearchBudget("functor enumeration", budget)
    decomposable = _decomposable(c)
    order = sorted(c.all_cells(), key=lambda x: (c.dim(x), x in decomposable))
    table = c.composition_table()
    identities = c.identity_table()
    by_boundary: Dict[Tuple, List[Label]] = defaultdict(list)
    for k in range(c.max_dim + 1):
        for y in d.cells(k):
            key = (k,) if k == 0 else (k, d.src(y), d.tgt(y))
            by_boundary[key].append(y)

    def propagate(assignment: Dict[Label, Label]) -> bool:
        changed = True
        while changed:
            changed = False
            for x, ident in identities.items():
                if x in assignment:
                    image = d.identity(assignment[x])
                    if ident not in assignment:
                        assignment[ident] = image
                        changed = True
                    elif assignment[ident] != image:
                        return False
            for (i, a, b), value in table.items():
                if a in assignment and b in assignment:
                    try:
                        image = d.compose(assignment[a], assignment[b], i)
                    except NotComposableError:
                        return False
                    if value not in assignment:
                        assignment[value] = image
                        changed = True
                    elif assignment[value] != image:
                        return False
        return True

    results: List[CatFunctor] = []

    def extend(assignment: Dict[Label, Label], position: int) -> None:
        while position < len(order) and order[position] in assignment:
            position += 1
        if position == len(order):
            functor = CatFunctor(c, d, assignment)
            if functor.is_valid():
                results.append(functor)
            return
        x = order[position]
        k = c.dim(x)
        key = (k,) if k == 0 else (k, assignment[c.src(x)], assignment[c.tgt(x)])
        for y in by_boundary.get(key, ()):
            counter.tick()
            trial = dict(assignment)
            trial[x] = y
            if propagate(trial):
                extend(trial, position + 1)

    extend({}, 0)
    logger.info("%d functors %s → %s (%d search nodes)", len(results), c.name, d.name, counter.nodes)
    return results


def fiber_product(f: CatFunctor, g: CatFunctor) -> Tuple[FiniteStrictNCat, CatFunctor, CatFunctor]:
    """The strict pullback A ×_C B of f: A → C and g: B → C, with its projections."""
    top = max(f.source.max_dim, g.source.max_dim, f.target.max_dim, g.target.max_dim)
    f, g = promote_functor(f, top), promote_functor(g, top)
    if f.target != g.target:
        raise InvalidCategoryError("fiber product needs functors with a common target")
    a, b = f.source, g.source
    cells = {k: [(x, y) for x in a.cells(k) for y in b.cells(k) if f(x) == g(y)] for k in range(top + 1)}
    present = set(itertools.chain.from_iterable(cells.values()))
    boundary = {(x, y): ((a.src(x), b.src(y)), (a.tgt(x), b.tgt(y)))
                for (x, y) in present if a.dim(x) > 0}
    identity = {(x, y): (a.identity(x), b.identity(y)) for (x, y) in present if a.dim(x) < top}
    composition = {}
    b_table = defaultdict(dict)
    for (i, p, q), v in b.composition_table().items():
        b_table[i][(p, q)] = v
    for (i, p, q), v in a.composition_table().items():
        for (p2, q2), v2 in b_table[i].items():
            if (p, p2) in present and (q, q2) in present:
                composition[(i, (p, p2), (q, q2))] = (v, v2)
    product = FiniteStrictNCat(top, cells, boundary, identity, composition, name=f"{a.name}×{b.name}")
    left = CatFunctor(product, a, {x: x[0] for x in present}, name="pr1")
    right = CatFunctor(product, b, {x: x[1] for x in present}, name="pr2")
    return product, left, right


def nu_functor(chain_map: ChainMap, max_dim: int, coeff_cap: Optional[int] = None) -> CatFunctor:
    """ν(f) between the nu categories of source and target.

    Raises:
        InvalidCategoryError: If an image cell exceeds the coefficient cap
    """
    source = from_nu(chain_map.source, max_dim, coeff_cap)
    target = from_nu(chain_map.target, max_dim, coeff_cap)
    mapping = {}
    for x in nu_cells(chain_map.source, max_dim, coeff_cap):
        table = tuple((chain_map.apply(m), chain_map.apply(p)) for m, p in x.table)
        image = str(NuCell(x.dimension, table))
        if image not in target:
            raise InvalidCategoryError(f"image of {x} is outside the enumerated cells")
        mapping[str(x)] = image
    return CatFunctor(source, target, mapping, name=f"ν({chain_map.name})")


def hom_functor(f: CatFunctor, a: Label, b: Label) -> CatFunctor:
    """The induced functor hom(a, b) → hom(f a, f b)."""
    f = _aligned(f)
    source = hom_cat(f.source, a, b)
    target = hom_cat(f.target, f(a), f(b))
    mapping = {}
    for x in source.all_cells():
        mapping[x] = ("id", f(x[1])) if f.source.max_dim == 0 else f(x)
    return CatFunctor(source, target, mapping, name=f"{f.name}[{a},{b}]")


# -- equivalences and surjectivity ----------------------------------------------

def is_invertible(c: FiniteStrictNCat, x: Label) -> bool:
    """Whether x has a strict inverse along its top boundary."""
    d = c.dim(x)
    if d == 0:
        return True
    for y in c.cells(d):
        if c.src(y) == c.tgt(x) and c.tgt(y) == c.src(x):
            if (c.compose(x, y, d - 1) == c.identity(c.src(x))
                    and c.compose(y, x, d - 1) == c.identity(c.tgt(x))):
                return True
    return False


def essentially_surjective(f: CatFunctor) -> bool:
    """Every object of the target is strictly isomorphic to an image object."""
    t = f.target
    images = {f(x) for x in f.source.objects}
    reachable = set(images)
    if t.max_dim > 0:
        for arrow in t.cells(1):
            if t.src(arrow) in images and is_invertible(t, arrow):
                reachable.add(t.tgt(arrow))
    return all(y in reachable for y in t.objects)


def is_strict_equivalence(f: CatFunctor) -> bool:
    f = _aligned(f)
    if f.source.max_dim == 0:
        images = [f(x) for x in f.source.objects]
        return len(set(images)) == len(images) and set(images) == set(f.target.objects)
    if not essentially_surjective(f):
        return False
    return all(is_strict_equivalence(hom_functor(f, a, b))
               for a in f.source.objects for b in f.source.objects)


def is_n_surjective(f: CatFunctor, n: int) -> bool:
    """Essentially surjective on objects and locally (n-1)-surjective."""
    if n < 0:
        return True
    f = _aligned(f)
    if not essentially_surjective(f):
        return False
    if n == 0:
        return True
    return all(is_n_surjective(hom_functor(f, a, b), n - 1)
               for a in f.source.objects for b in f.source.objects)


def is_n_fully_faithful(f: CatFunctor, n: int) -> bool:
    """0-fully faithful is a strict equivalence; n-fully faithful is locally (n-1)-fully faithful."""
    if n < 0:
        raise ValueError("full faithfulness starts at 0")
    f = _aligned(f)
    if n == 0:
        return is_strict_equivalence(f)
    return all(is_n_fully_faithful(hom_functor(f, a, b), n - 1)
               for a in f.source.objects for b in f.source.objects)


def lifting_oracle(f: CatFunctor, n: int) -> bool:
    """Right lifting against ∂D_k → D_k for every k ≤ n, with strict lifts.

    Agrees with is_n_surjective when the target has no non-identity invertible cells.
    """
    f = _aligned(f)
    s, t = f.source, f.target
    top = s.max_dim
    for k in range(min(n, top + 1) + 1):
        if k == 0:
            if not set(t.objects) <= {f(x) for x in s.objects}:
                return False
            continue
        lower = s.cells(k - 1)
        for a, b in itertools.product(lower, repeat=2):
            if k > 1 and (s.src(a), s.tgt(a)) != (s.src(b), s.tgt(b)):
                continue
            if k <= top:
                wanted = [y for y in t.cells(k) if t.src(y) == f(a) and t.tgt(y) == f(b)]
                hits = {f(x) for x in s.cells(k) if s.src(x) == a and s.tgt(x) == b}
            else:
                # above the top dimension only identities exist
                wanted = [None] if f(a) == f(b) else []
                hits = {None} if a == b else set()
            if any(y not in hits for y in wanted):
                return False
    return True


def factorize(f: CatFunctor, n: int) -> Tuple[CatFunctor, CatFunctor]:
    """f = e then g with e n-surjective and g (n+1)-fully faithful.

    The middle category keeps the cells of the source up to dimension n; above
    n its cells are triples ("~", x, x', θ) with x, x' parallel and θ: g x → g x'
    a cell of the target.
    """
    if n < 0:
        return f, identity_functor(f.target)
    if n > 2:
        raise InvalidCategoryError("factorization is supported for n ≤ 2")
    top = max(f.source.max_dim, f.target.max_dim, n + 1)
    f = promote_functor(f, top)
    c, d = f.source, f.target

    cells: Dict[int, List[Label]] = {k: list(c.cells(k)) for k in range(n + 1)}
    boundary = {x: bd for x, bd in c.boundary_table().items() if c.dim(x) <= n}
    identity = {x: y for x, y in c.identity_table().items() if c.dim(x) < n}
    composition = {key: v for key, v in c.composition_table().items() if c.dim(v) <= n}
    to_target = {x: f(x) for k in range(n + 1) for x in c.cells(k)}
    dims = {x: k for k in cells for x in cells[k]}

    def src(x, k):
        while dims[x] > k:
            x = boundary[x][0]
        return x

    def tgt(x, k):
        while dims[x] > k:
            x = boundary[x][1]
        return x

    for k in range(n + 1, top + 1):
        level = []
        for x, x2 in itertools.product(cells[k - 1], repeat=2):
            if k > 1 and boundary[x] != boundary[x2]:
                continue
            for theta in d.cells(k):
                if d.src(theta) == to_target[x] and d.tgt(theta) == to_target[x2]:
                    cell = ("~", x, x2, theta)
                    level.append(cell)
                    boundary[cell] = (x, x2)
                    to_target[cell] = theta
                    dims[cell] = k
        cells[k] = level
        for x in cells[k - 1]:
            identity[x] = ("~", x, x, d.identity(to_target[x]))
        for i in range(k):
            for u, v in itertools.product(level, repeat=2):
                if tgt(u, i) != src(v, i):
                    continue
                theta = d.compose(u[3], v[3], i)
                if i == k - 1:
                    composition[(i, u, v)] = ("~", u[1], v[2], theta)
                else:
                    composition[(i, u, v)] = ("~", composition[(i, u[1], v[1])], composition[(i, u[2], v[2])], theta)
    middle = FiniteStrictNCat(top, cells, boundary, identity, composition, name=f"im{n}({c.name})")

    first = {}
    for k in range(top + 1):
        for x in c.cells(k):
            first[x] = x if k <= n else ("~", first[c.src(x)], first[c.tgt(x)], f(x))
    e = CatFunctor(c, middle, first, name="e")
    g = CatFunctor(middle, d, to_target, name="g")
    logger.debug("factorization at %d: middle sizes %s", n, [len(cells[k]) for k in range(top + 1)])
    return e, g
