"""
Lax squares in finite strict 2-categories.

A filtration A_0 → A_1 (A_0 a 1-category, A_1 a 2-category) gives a double
category whose vertical cells come from A_0, whose horizontal cells are the
1-cells of A_1 between images of objects, and whose squares are lax squares

    x --u--> y
    |        |
  F l  θ   F r        θ: F(l)·v ⇒ u·F(r)
    v        v
    x' -v--> y'

The square functor sq2 is the case A_0 = τ≤1(A_1); its Čech levels stack
horizontal paths of squares.
"""

import itertools
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, Hashable, List, Mapping, Optional, Tuple

import config
from adc import Adc, ChainMap, path_adc, tensor, tensor_maps
from doublecat import (
    Boundary, FiniteDoubleCat, completeness_report, every_horizontal_is_companion, find_companions,
)
from errors import DimensionBoundError, InvalidCategoryError, NotComposableError, PairConditionError
from reports import Report
from strictcat import (
    CatFunctor, FiniteStrictNCat, enumerate_functors, fiber_product, from_nu, is_n_surjective,
    nu_functor, promote, promote_functor, truncate,
)

logger = logging.getLogger(__name__)

Label = Hashable


@dataclass
class Filtration2:
    """A functor from a 1-category into a 2-category.

    Args:
        a0: Category of vertical cells (max_dim ≤ 1)
        a1: Ambient 2-category (max_dim ≤ 2)
        map: Functor a0 → a1
    """
    a0: FiniteStrictNCat
    a1: FiniteStrictNCat
    map: CatFunctor
    name: str = ""

    def __post_init__(self):
        if self.a0.max_dim > 1 or self.a1.max_dim > 2:
            raise InvalidCategoryError("a filtration runs from a 1-category into a 2-category")
        self.a0 = promote(self.a0, 1)
        self.a1 = promote(self.a1, 2)
        self.map = CatFunctor(self.a0, self.a1, promote_functor(self.map, 1).mapping, name=self.map.name)
        report = self.map.violations()
        if not report.ok:
            raise InvalidCategoryError(f"filtration map is not a functor:\n{report}")

    @property
    def is_pair(self) -> bool:
        """The map is injective on objects and 1-cells."""
        for d in (0, 1):
            images = [self.map(x) for x in self.a0.cells(d)]
            if len(set(images)) != len(images):
                return False
        return True


def truncation_pair(c: FiniteStrictNCat) -> Filtration2:
    """τ≤1(c) ⊂ c."""
    c = promote(c, 2)
    a0 = truncate(c, 1)
    return Filtration2(a0, c, CatFunctor(a0, c, {x: x for x in a0.all_cells()}, name="incl"), name=c.name)


class _LaxSquares:
    """Label bookkeeping for the double category of a filtration."""

    def __init__(self, filt: Filtration2, plain: bool):
        self.filt = filt
        self.c = filt.a1
        self.plain = plain
        self.F = filt.map

    def hcell(self, x: Label, y: Label, u: Label) -> Label:
        return u if self.plain else (x, y, u)

    def underlying(self, h: Label) -> Label:
        return h if self.plain else h[2]

    def filler_source(self, left: Label, bottom: Label) -> Label:
        return self.c.compose(self.F(left), self.underlying(bottom), 0)

    def filler_target(self, top: Label, right: Label) -> Label:
        return self.c.compose(self.underlying(top), self.F(right), 0)


def lax_square_double(filt: Filtration2, require_pair: bool = True) -> FiniteDoubleCat:
    """The double category of lax squares of a filtration.

    Squares are labelled ("sq", top, bottom, left, right, θ). Horizontal cells
    are the 1-cells of a1 themselves when the map is a pair, and triples
    (x, y, u) otherwise.

    Raises:
        PairConditionError: If require_pair is set and the map is not injective
            on objects and 1-cells
    """
    if require_pair and not filt.is_pair:
        raise PairConditionError(f"{filt.name or 'filtration'} is not injective on objects and 1-cells")
    book = _LaxSquares(filt, filt.is_pair)
    a0, c, F = filt.a0, filt.a1, filt.map

    objects = list(a0.objects)
    vcells = {f: (a0.src(f), a0.tgt(f)) for f in a0.cells(1)}
    hcells: Dict[Label, Tuple[Label, Label]] = {}
    by_ends = defaultdict(list)
    for x, y in itertools.product(objects, repeat=2):
        for u in c.cells(1):
            if c.src(u) == F(x) and c.tgt(u) == F(y):
                h = book.hcell(x, y, u)
                hcells[h] = (x, y)
                by_ends[(x, y)].append(h)
    vid = {x: a0.identity(x) for x in objects}
    hid = {x: book.hcell(x, x, c.identity(F(x))) for x in objects}
    vcomp = {(f, g): v for (i, f, g), v in a0.composition_table().items() if i == 0}
    hcomp = {}
    for (h, (x, y)), (k, (y2, z)) in itertools.product(hcells.items(), repeat=2):
        if y == y2:
            hcomp[(h, k)] = book.hcell(x, z, c.compose(book.underlying(h), book.underlying(k), 0))

    fillers = defaultdict(list)
    for theta in c.cells(2):
        fillers[(c.src(theta), c.tgt(theta))].append(theta)
    out = defaultdict(list)
    for f, (s, _) in vcells.items():
        out[s].append(f)

    squares: Dict[Label, Boundary] = {}
    for top, (x, y) in hcells.items():
        for left, right in itertools.product(out[x], out[y]):
            for bottom in by_ends[(vcells[left][1], vcells[right][1])]:
                key = (book.filler_source(left, bottom), book.filler_target(top, right))
                for theta in fillers.get(key, ()):
                    squares[("sq", top, bottom, left, right, theta)] = Boundary(top, bottom, left, right)

    unit_v = {h: ("sq", h, h, vid[x], vid[y], c.identity(book.underlying(h))) for h, (x, y) in hcells.items()}
    unit_h = {f: ("sq", hid[s], hid[t], f, f, c.identity(F(f))) for f, (s, t) in vcells.items()}

    stack, beside = {}, {}
    by_top = defaultdict(list)
    by_left = defaultdict(list)
    for beta, b in squares.items():
        by_top[b.top].append(beta)
        by_left[b.left].append(beta)
    for alpha, a in squares.items():
        for beta in by_top[a.bottom]:
            b = squares[beta]
            theta = c.compose(c.compose(F(a.left), beta[5], 0), c.compose(alpha[5], F(b.right), 0), 1)
            stack[(alpha, beta)] = ("sq", a.top, b.bottom, vcomp[(a.left, b.left)], vcomp[(a.right, b.right)], theta)
        for beta in by_left[a.right]:
            b = squares[beta]
            theta = c.compose(c.compose(alpha[5], book.underlying(b.bottom), 0),
                              c.compose(book.underlying(a.top), beta[5], 0), 1)
            beside[(alpha, beta)] = ("sq", hcomp[(a.top, b.top)], hcomp[(a.bottom, b.bottom)], a.left, b.right, theta)

    d = FiniteDoubleCat(objects, vcells, hcells, squares, vid, hid, vcomp, hcomp,
                        unit_v, unit_h, stack, beside, name=f"sq({filt.name})" if filt.name else "sq")
    logger.info("lax squares of %s: %d vertical, %d horizontal, %d squares",
                filt.name, len(vcells), len(hcells), len(squares))
    return d


def sq2(c: FiniteStrictNCat) -> FiniteDoubleCat:
    """The double category of lax squares in a 2-category."""
    d = lax_square_double(truncation_pair(c))
    d.name = f"sq2({c.name})" if c.name else "sq2"
    return d


def sq_pair(filt: Filtration2) -> FiniteDoubleCat:
    """
    Raises:
        PairConditionError: If the map is not injective on objects and 1-cells
    """
    return lax_square_double(filt, require_pair=True)


# -- orientation ------------------------------------------------------------

def _grid() -> Tuple[FiniteStrictNCat, Dict[str, Label]]:
    """ν([1]⊗[1]) and its four edges and face."""
    grid = from_nu(tensor(path_adc(1), path_adc(1)), 2)

    def obj(i, j):
        return f"⟨{{{i}}}⊗{{{j}}}⟩"

    def edge(a, b):
        return next(e for e in grid.cells(1) if (grid.src(e), grid.tgt(e)) == (a, b))

    parts = {
        "top": edge(obj(0, 0), obj(1, 0)),
        "bottom": edge(obj(0, 1), obj(1, 1)),
        "left": edge(obj(0, 0), obj(0, 1)),
        "right": edge(obj(1, 0), obj(1, 1)),
        "face": next(x for x in grid.cells(2) if not grid.is_identity(x)),
    }
    return grid, parts


def verify_square_orientation(c: FiniteStrictNCat, budget: Optional[int] = None) -> Report:
    """Squares of sq2(c) are in bijection with functors ν([1]⊗[1]) → c."""
    c = promote(c, 2)
    d = sq2(c)
    grid, parts = _grid()
    report = Report(f"square orientation {c.name}".strip())
    hit = set()
    for functor in enumerate_functors(grid, c, budget):
        alpha = ("sq", functor(parts["top"]), functor(parts["bottom"]), functor(parts["left"]),
                 functor(parts["right"]), functor(parts["face"]))
        if alpha not in d.squares:
            report.add(alpha, "orientation", "functor does not give a square")
        elif alpha in hit:
            report.add(alpha, "orientation", "two functors give the same square")
        hit.add(alpha)
    for alpha in d.squares:
        if alpha not in hit:
            report.add(alpha, "orientation", "square missed by every functor")
    report.facts["squares"] = len(d.squares)
    return report


# -- Čech levels -------------------------------------------------------------

def _vertical_category(d: FiniteDoubleCat) -> FiniteStrictNCat:
    return FiniteStrictNCat(
        1, {0: list(d.objects), 1: list(d.vcells)}, d.vcells, d.vertical_identity,
        {(0, f, g): v for (f, g), v in d.vertical_composition.items()},
    )


def cech_level(filt: Filtration2, m: int) -> FiniteStrictNCat:
    """Level m of the Čech nerve: horizontal m-paths and their m-rows of squares.

    Objects are tuples of horizontal cells, morphisms tuples of horizontally
    composable squares, composed by stacking each component.
    """
    if m < 0:
        raise ValueError("Čech levels start at 0")
    d = lax_square_double(filt, require_pair=False)
    if m == 0:
        level = _vertical_category(d)
        level.name = f"č0({filt.name})"
        return level

    paths = [(h,) for h in d.hcells]
    rows = [(a,) for a in d.squares]
    for _ in range(m - 1):
        paths = [p + (h,) for p in paths for h in d.hcells if d.hsrc(h) == d.htgt(p[-1])]
        rows = [r + (a,) for r in rows for a in d.squares if d.boundary(a).left == d.boundary(r[-1]).right]
    boundary = {r: (tuple(d.boundary(a).top for a in r), tuple(d.boundary(a).bottom for a in r)) for r in rows}
    identity = {p: tuple(d.unit_v(h) for h in p) for p in paths}
    by_top = defaultdict(list)
    for r in rows:
        by_top[boundary[r][0]].append(r)
    composition = {}
    for r in rows:
        for s in by_top[boundary[r][1]]:
            composition[(0, r, s)] = tuple(d.stack(a, b) for a, b in zip(r, s))
    level = FiniteStrictNCat(1, {0: paths, 1: rows}, boundary, identity, composition, name=f"č{m}({filt.name})")
    logger.debug("Čech level %d of %s: %d objects, %d morphisms", m, filt.name, len(paths), len(rows))
    return level


def _face(level1: FiniteStrictNCat, level0: FiniteStrictNCat, d: FiniteDoubleCat, side: str) -> CatFunctor:
    mapping = {}
    for p in level1.objects:
        mapping[p] = d.hsrc(p[0]) if side == "source" else d.htgt(p[0])
    for r in level1.cells(1):
        b = d.boundary(r[0])
        mapping[r] = b.left if side == "source" else b.right
    return CatFunctor(level1, level0, mapping, name=side)


def segal_check(filt: Filtration2, m: int) -> Report:
    """Level m is isomorphic to m copies of level 1 pulled back over level 0."""
    report = Report(f"Segal level {m} of {filt.name}".strip())
    if m < 2:
        report.facts["trivial"] = True
        return report
    d = lax_square_double(filt, require_pair=False)
    level0, level1, level_m = cech_level(filt, 0), cech_level(filt, 1), cech_level(filt, m)
    target, source = _face(level1, level0, d, "target"), _face(level1, level0, d, "source")

    pullback, last = level1, CatFunctor(level1, level1, {x: x for x in level1.all_cells()})
    for _ in range(m - 1):
        pullback, first_leg, second_leg = fiber_product(last.then(target), source)
        last = second_leg

    def nest(cells):
        value = (cells[0],)
        for x in cells[1:]:
            value = (value, (x,))
        return value

    comparison = CatFunctor(level_m, pullback, {x: nest(x) for x in level_m.all_cells()}, name="segal")
    if not comparison.is_valid():
        report.merge(comparison.violations(), prefix="functor:")
    elif not comparison.is_isomorphism():
        report.add(m, "isomorphism", "comparison functor is not bijective")
    report.facts["level"] = [len(level_m.cells(k)) for k in (0, 1)]
    report.facts["pullback"] = [len(pullback.cells(k)) for k in (0, 1)]
    return report


# -- double functors -----------------------------------------------------------

@dataclass
class DoubleFunctor:
    """A map of double categories given on objects, both kinds of cells and squares."""
    source: FiniteDoubleCat
    target: FiniteDoubleCat
    objects: Dict[Label, Label] = field(default_factory=dict)
    vcells: Dict[Label, Label] = field(default_factory=dict)
    hcells: Dict[Label, Label] = field(default_factory=dict)
    squares: Dict[Label, Label] = field(default_factory=dict)
    name: str = ""

    def violations(self) -> Report:
        report = Report(f"double functor {self.name}".strip())
        s, t = self.source, self.target
        for kind, domain, codomain in (("objects", s.objects, t.objects), ("vcells", s.vcells, t.vcells),
                                       ("hcells", s.hcells, t.hcells), ("squares", s.squares, t.squares)):
            table = getattr(self, kind)
            for x in domain:
                if table.get(x) not in codomain:
                    report.add(x, "total", f"{kind} image {table.get(x)!r}")
        if not report.ok:
            return report
        o, v, h, q = self.objects, self.vcells, self.hcells, self.squares
        for f, (a, b) in s.vcells.items():
            if t.vcells[v[f]] != (o[a], o[b]):
                report.add(f, "boundary", "vertical cell ends not preserved")
        for k, (a, b) in s.hcells.items():
            if t.hcells[h[k]] != (o[a], o[b]):
                report.add(k, "boundary", "horizontal cell ends not preserved")
        for alpha, b in s.squares.items():
            if t.boundary(q[alpha]) != Boundary(h[b.top], h[b.bottom], v[b.left], v[b.right]):
                report.add(alpha, "boundary", "square boundary not preserved")
        if not report.ok:
            return report
        for a in s.objects:
            if v[s.vid(a)] != t.vid(o[a]) or h[s.hid(a)] != t.hid(o[a]):
                report.add(a, "units", "identity cell not preserved")
        for k in s.hcells:
            if q[s.unit_v(k)] != t.unit_v(h[k]):
                report.add(k, "units", "vertical identity square not preserved")
        for f in s.vcells:
            if q[s.unit_h(f)] != t.unit_h(v[f]):
                report.add(f, "units", "horizontal identity square not preserved")
        checks = (
            (s.vertical_composition, v, v, t.vcompose),
            (s.horizontal_composition, h, h, t.hcompose),
            (s.square_vertical_composition, q, q, t.stack),
            (s.square_horizontal_composition, q, q, t.beside),
        )
        for table, inner, outer, compose in checks:
            for (x, y), value in table.items():
                try:
                    if compose(inner[x], inner[y]) != outer[value]:
                        report.add((x, y), "composition", "composite not preserved")
                except (NotComposableError, InvalidCategoryError) as e:
                    report.add((x, y), "composition", str(e))
        return report

    def is_valid(self) -> bool:
        return self.violations().ok

    def key(self) -> Tuple:
        return tuple(frozenset(getattr(self, kind).items()) for kind in ("objects", "vcells", "hcells", "squares"))

    def __eq__(self, other) -> bool:
        if not isinstance(other, DoubleFunctor):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())


_KINDS = ("objects", "vcells", "hcells", "squares")


def _constraints(d: FiniteDoubleCat, e: FiniteDoubleCat) -> List[Tuple[Tuple, Tuple, object]]:
    """(inputs, output, rule): output's image is rule applied to the input images."""
    rules = []
    for a in d.objects:
        rules.append(((("objects", a),), ("vcells", d.vid(a)), e.vid))
        rules.append(((("objects", a),), ("hcells", d.hid(a)), e.hid))
    for k in d.hcells:
        rules.append(((("hcells", k),), ("squares", d.unit_v(k)), e.unit_v))
    for f in d.vcells:
        rules.append(((("vcells", f),), ("squares", d.unit_h(f)), e.unit_h))
    tables = (("vcells", d.vertical_composition, e.vcompose), ("hcells", d.horizontal_composition, e.hcompose),
              ("squares", d.square_vertical_composition, e.stack),
              ("squares", d.square_horizontal_composition, e.beside))
    for kind, table, compose in tables:
        for (x, y), value in table.items():
            if value != x and value != y:
                rules.append((((kind, x), (kind, y)), (kind, value), compose))
    return rules


def double_functor_enumerate(d: FiniteDoubleCat, e: FiniteDoubleCat,
                             budget: Optional[int] = None) -> List[DoubleFunctor]:
    """All double functors d → e by backtracking with boundary pruning.

    Raises:
        BudgetExceededError: If the search exceeds its budget
    """
    counter = config.SearchBudget("double functor enumeration", budget)
    rules = _constraints(d, e)
    order = [("objects", a) for a in d.objects] + [("vcells", f) for f in d.vcells] \
        + [("hcells", h) for h in d.hcells] + [("squares", q) for q in d.squares]

    def candidates(cell, assignment) -> List[Label]:
        kind, x = cell
        if kind == "objects":
            return list(e.objects)
        if kind in ("vcells", "hcells"):
            ends = (d.vcells if kind == "vcells" else d.hcells)[x]
            wanted = (assignment[("objects", ends[0])], assignment[("objects", ends[1])])
            pool = e.vcells if kind == "vcells" else e.hcells
            return [y for y, bd in pool.items() if bd == wanted]
        b = d.boundary(x)
        return e.squares_with(assignment[("hcells", b.top)], assignment[("hcells", b.bottom)],
                              assignment[("vcells", b.left)], assignment[("vcells", b.right)])

    def propagate(assignment) -> bool:
        changed = True
        while changed:
            changed = False
            for inputs, output, rule in rules:
                if not all(i in assignment for i in inputs):
                    continue
                try:
                    image = rule(*(assignment[i] for i in inputs))
                except (NotComposableError, InvalidCategoryError):
                    return False
                if output not in assignment:
                    assignment[output] = image
                    changed = True
                elif assignment[output] != image:
                    return False
        return True

    results: List[DoubleFunctor] = []

    def extend(assignment, position) -> None:
        while position < len(order) and order[position] in assignment:
            position += 1
        if position == len(order):
            tables = {kind: {} for kind in _KINDS}
            for (kind, x), y in assignment.items():
                tables[kind][x] = y
            functor = DoubleFunctor(d, e, **tables)
            if functor.is_valid():
                results.append(functor)
            return
        cell = order[position]
        for y in candidates(cell, assignment):
            counter.tick()
            trial = dict(assignment)
            trial[cell] = y
            if propagate(trial):
                extend(trial, position + 1)

    extend({}, 0)
    logger.info("%d double functors %s → %s (%d search nodes)", len(results), d.name, e.name, counter.nodes)
    return results


def sq2_functor(f: CatFunctor) -> DoubleFunctor:
    """sq2 applied to a functor of 2-categories."""
    f = promote_functor(f, 2)
    source, target = sq2(f.source), sq2(f.target)
    squares = {alpha: ("sq", f(alpha[1]), f(alpha[2]), f(alpha[3]), f(alpha[4]), f(alpha[5]))
               for alpha in source.squares}
    return DoubleFunctor(
        source, target,
        objects={a: f(a) for a in source.objects},
        vcells={x: f(x) for x in source.vcells},
        hcells={x: f(x) for x in source.hcells},
        squares=squares, name=f"sq2({f.name})" if f.name else "",
    )


def verify_sq_fully_faithful(c: FiniteStrictNCat, d: FiniteStrictNCat, budget: Optional[int] = None) -> Report:
    """sq2 gives a bijection from functors c → d to double functors sq2(c) → sq2(d)."""
    c, d = promote(c, 2), promote(d, 2)
    report = Report(f"sq2 fully faithful {c.name} → {d.name}")
    functors = enumerate_functors(c, d, budget)
    doubles = double_functor_enumerate(sq2(c), sq2(d), budget)
    images = set()
    for f in functors:
        image = sq2_functor(f)
        if not image.is_valid():
            report.add(f.mapping, "functorial", "image is not a double functor")
        if image in images:
            report.add(f.mapping, "injective", "two functors give the same double functor")
        images.add(image)
    for g in doubles:
        if g not in images:
            report.add(g.objects, "surjective", "double functor not induced by a functor")
    report.facts["functors"] = len(functors)
    report.facts["double_functors"] = len(doubles)
    return report


def verify_sq_image(c: FiniteStrictNCat) -> Report:
    """sq2(c) is accompanied and complete, and every horizontal cell is a companion."""
    d = sq2(c)
    report = Report(f"sq2 image {c.name}".strip())
    for f in d.vcells:
        if not find_companions(d, f):
            report.add(f, "accompanied", "vertical cell without companion")
    report.merge(completeness_report(d), prefix="complete:")
    if not every_horizontal_is_companion(d):
        report.add(d.name, "horizontal-companions", "some horizontal cell is no companion")
    report.facts["squares"] = len(d.squares)
    return report


def cube_level(c: FiniteStrictNCat, k1: int, k2: int, budget: Optional[int] = None) -> int:
    """|Hom(ν([k1]⊗[k2]), c)|."""
    if not (0 <= k1 <= 2 and 0 <= k2 <= 2):
        raise DimensionBoundError("cube levels are computed for k1, k2 ≤ 2")
    top = 2 if k1 and k2 else 1
    return len(enumerate_functors(from_nu(tensor(path_adc(k1), path_adc(k2)), top), promote(c, 2), budget))


def check_tensor_surjection(f: ChainMap, c: Adc, n: int) -> Report:
    """If ν(f) is n-surjective, so is ν(f ⊗ C)."""
    product = tensor_maps(f, ChainMap.identity(c))
    top = max(product.source.top_degree, product.target.top_degree, 1)
    if top > config.MAX_CATEGORY_DIM:
        raise DimensionBoundError(f"f ⊗ C has dimension {top}, above {config.MAX_CATEGORY_DIM}")
    report = Report(f"surjection through ⊗ {c.name}".strip())
    base = is_n_surjective(nu_functor(f, max(f.source.top_degree, f.target.top_degree, 1)), n)
    tensored = is_n_surjective(nu_functor(product, top), n)
    report.facts["map"] = base
    report.facts["tensored"] = tensored
    if base and not tensored:
        report.add(n, "tensor-surjection", "f is n-surjective but f ⊗ C is not")
    return report
