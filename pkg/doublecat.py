"""
Finite strict (1,1)-double categories with markings.

A square α is drawn with its top and bottom horizontal cells and its left and
right vertical cells:

    a --top--> c
    |          |
   left  α   right
    v          v
    b -bottom-> d

Vertical composition stacks α above β (bottom α = top β); horizontal
composition puts α left of β (right α = left β). I^v_h is the vertical
identity square on a horizontal cell h, I^h_f the horizontal identity square
on a vertical cell f.
"""

import itertools
import logging
from collections import defaultdict
from dataclasses import dataclass
from typing import Any, Callable, Dict, FrozenSet, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple

from errors import CompanionError, InvalidCategoryError, MarkingError, NotComposableError
from reports import Report
from strictcat import FiniteStrictNCat

logger = logging.getLogger(__name__)

Label = Hashable

READINGS = ("transpose", "shape")


@dataclass(frozen=True)
class Boundary:
    top: Label
    bottom: Label
    left: Label
    right: Label


@dataclass(frozen=True)
class CompanionTriple:
    """A companion f̄ of the vertical cell f with its unit ψ and counit φ."""
    vcell: Label
    companion: Label
    unit: Label
    counit: Label

    def to_dict(self) -> Dict[str, str]:
        return {"vcell": str(self.vcell), "companion": str(self.companion),
                "unit": str(self.unit), "counit": str(self.counit)}


class FiniteDoubleCat:
    """A finite double category given by explicit tables.

    Args:
        objects: Objects
        vcells: Vertical cell → (source, target)
        hcells: Horizontal cell → (source, target)
        squares: Square → Boundary
        vertical_identity: Object → vertical identity cell
        horizontal_identity: Object → horizontal identity cell
        vertical_composition: (f, g) → f then g
        horizontal_composition: (h, k) → h then k
        square_identity_v: Horizontal cell h → I^v_h
        square_identity_h: Vertical cell f → I^h_f
        square_vertical_composition: (α, β) → α stacked above β
        square_horizontal_composition: (α, β) → α placed left of β
        marked_vcells: Marked vertical cells, or None when unmarked
        marked_squares: Marked squares, or None when unmarked
        name: Display name
    """

    def __init__(self, objects: Sequence[Label],
                 vcells: Mapping[Label, Tuple[Label, Label]],
                 hcells: Mapping[Label, Tuple[Label, Label]],
                 squares: Mapping[Label, Boundary],
                 vertical_identity: Mapping[Label, Label],
                 horizontal_identity: Mapping[Label, Label],
                 vertical_composition: Mapping[Tuple[Label, Label], Label],
                 horizontal_composition: Mapping[Tuple[Label, Label], Label],
                 square_identity_v: Mapping[Label, Label],
                 square_identity_h: Mapping[Label, Label],
                 square_vertical_composition: Mapping[Tuple[Label, Label], Label],
                 square_horizontal_composition: Mapping[Tuple[Label, Label], Label],
                 marked_vcells: Optional[Iterable[Label]] = None,
                 marked_squares: Optional[Iterable[Label]] = None,
                 name: str = ""):
        self.objects = tuple(objects)
        self.vcells = dict(vcells)
        self.hcells = dict(hcells)
        self.squares = {a: b if isinstance(b, Boundary) else Boundary(*b) for a, b in squares.items()}
        self.vertical_identity = dict(vertical_identity)
        self.horizontal_identity = dict(horizontal_identity)
        self.vertical_composition = dict(vertical_composition)
        self.horizontal_composition = dict(horizontal_composition)
        self.square_identity_v = dict(square_identity_v)
        self.square_identity_h = dict(square_identity_h)
        self.square_vertical_composition = dict(square_vertical_composition)
        self.square_horizontal_composition = dict(square_horizontal_composition)
        self.marked_vcells: Optional[FrozenSet] = None if marked_vcells is None else frozenset(marked_vcells)
        self.marked_squares: Optional[FrozenSet] = None if marked_squares is None else frozenset(marked_squares)
        self.name = name
        self._check_references()
        self._by_boundary: Dict[Boundary, List[Label]] = defaultdict(list)
        for alpha, boundary in self.squares.items():
            self._by_boundary[boundary].append(alpha)

    def _check_references(self) -> None:
        known = set(self.objects)
        for kind, cells in (("vertical", self.vcells), ("horizontal", self.hcells)):
            for x, (s, t) in cells.items():
                if s not in known or t not in known:
                    raise InvalidCategoryError(f"{kind} cell {x!r} has an endpoint outside the objects")
        for alpha, b in self.squares.items():
            if b.top not in self.hcells or b.bottom not in self.hcells:
                raise InvalidCategoryError(f"square {alpha!r} has a horizontal side that is not a horizontal cell")
            if b.left not in self.vcells or b.right not in self.vcells:
                raise InvalidCategoryError(f"square {alpha!r} has a vertical side that is not a vertical cell")
        if self.marked_vcells is not None and not self.marked_vcells <= set(self.vcells):
            raise InvalidCategoryError("marking lists unknown vertical cells")
        if self.marked_squares is not None and not self.marked_squares <= set(self.squares):
            raise InvalidCategoryError("marking lists unknown squares")

    # -- cells -------------------------------------------------------------

    def vsrc(self, f: Label) -> Label:
        return self.vcells[f][0]

    def vtgt(self, f: Label) -> Label:
        return self.vcells[f][1]

    def hsrc(self, h: Label) -> Label:
        return self.hcells[h][0]

    def htgt(self, h: Label) -> Label:
        return self.hcells[h][1]

    def boundary(self, alpha: Label) -> Boundary:
        return self.squares[alpha]

    def vid(self, a: Label) -> Label:
        return self.vertical_identity[a]

    def hid(self, a: Label) -> Label:
        return self.horizontal_identity[a]

    def unit_v(self, h: Label) -> Label:
        """I^v_h."""
        return self.square_identity_v[h]

    def unit_h(self, f: Label) -> Label:
        """I^h_f."""
        return self.square_identity_h[f]

    def vcompose(self, f: Label, g: Label) -> Label:
        if self.vtgt(f) != self.vsrc(g):
            raise NotComposableError(f"vertical cells {f!r} and {g!r} do not meet")
        return _lookup(self.vertical_composition, (f, g), "vertical composition")

    def hcompose(self, h: Label, k: Label) -> Label:
        if self.htgt(h) != self.hsrc(k):
            raise NotComposableError(f"horizontal cells {h!r} and {k!r} do not meet")
        return _lookup(self.horizontal_composition, (h, k), "horizontal composition")

    def stack(self, alpha: Label, beta: Label) -> Label:
        """alpha above beta."""
        if self.boundary(alpha).bottom != self.boundary(beta).top:
            raise NotComposableError(f"bottom of {alpha!r} is not the top of {beta!r}")
        return _lookup(self.square_vertical_composition, (alpha, beta), "vertical composition of squares")

    def beside(self, alpha: Label, beta: Label) -> Label:
        """alpha to the left of beta."""
        if self.boundary(alpha).right != self.boundary(beta).left:
            raise NotComposableError(f"right side of {alpha!r} is not the left side of {beta!r}")
        return _lookup(self.square_horizontal_composition, (alpha, beta), "horizontal composition of squares")

    def paste(self, grid: Sequence[Sequence[Label]]) -> Label:
        """Evaluate a rectangular grid of squares: rows side by side, then stacked."""
        if not grid or not grid[0] or any(len(row) != len(grid[0]) for row in grid):
            raise NotComposableError("pasting needs a non-empty rectangular grid")
        rows = []
        for row in grid:
            value = row[0]
            for alpha in row[1:]:
                value = self.beside(value, alpha)
            rows.append(value)
        value = rows[0]
        for alpha in rows[1:]:
            value = self.stack(value, alpha)
        return value

    def squares_with(self, top: Label = None, bottom: Label = None,
                     left: Label = None, right: Label = None) -> List[Label]:
        """Squares matching every given side, in table order."""
        if None not in (top, bottom, left, right):
            return list(self._by_boundary.get(Boundary(top, bottom, left, right), ()))
        found = []
        for alpha, b in self.squares.items():
            if ((top is None or b.top == top) and (bottom is None or b.bottom == bottom)
                    and (left is None or b.left == left) and (right is None or b.right == right)):
                found.append(alpha)
        return found

    def is_globular(self, alpha: Label) -> bool:
        b = self.boundary(alpha)
        return b.left == self.vid(self.vsrc(b.left)) and b.right == self.vid(self.vsrc(b.right))

    # -- markings ------------------------------------------------------------

    @property
    def is_marked(self) -> bool:
        return self.marked_vcells is not None

    def is_marked_vcell(self, f: Label) -> bool:
        return self.marked_vcells is not None and f in self.marked_vcells

    def is_marked_square(self, alpha: Label) -> bool:
        return self.marked_squares is not None and alpha in self.marked_squares

    def with_marking(self, vcells: Optional[Iterable[Label]], squares: Optional[Iterable[Label]]) -> "FiniteDoubleCat":
        return FiniteDoubleCat(
            self.objects, self.vcells, self.hcells, self.squares,
            self.vertical_identity, self.horizontal_identity,
            self.vertical_composition, self.horizontal_composition,
            self.square_identity_v, self.square_identity_h,
            self.square_vertical_composition, self.square_horizontal_composition,
            vcells, squares, name=self.name,
        )

    def trivially_marked(self) -> "FiniteDoubleCat":
        """Only the units are marked."""
        return self.with_marking(self.vertical_identity.values(), self.square_identity_v.values())

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiniteDoubleCat):
            return NotImplemented
        return _tables(self) == _tables(other)

    def __hash__(self) -> int:
        return hash((len(self.objects), len(self.vcells), len(self.hcells), len(self.squares)))

    def __repr__(self) -> str:
        return (f"<FiniteDoubleCat {self.name or ''} objects={len(self.objects)} vcells={len(self.vcells)} "
                f"hcells={len(self.hcells)} squares={len(self.squares)}>")


def _tables(d: FiniteDoubleCat) -> Tuple:
    return (set(d.objects), d.vcells, d.hcells, d.squares, d.vertical_identity, d.horizontal_identity,
            d.vertical_composition, d.horizontal_composition, d.square_identity_v, d.square_identity_h,
            d.square_vertical_composition, d.square_horizontal_composition, d.marked_vcells, d.marked_squares)


def _lookup(table: Mapping, key: Tuple, what: str) -> Label:
    try:
        return table[key]
    except KeyError:
        raise InvalidCategoryError(f"{what} table has no entry for {key!r}")


# -- validation ---------------------------------------------------------------

def _check_category(report: Report, rule: str, objects: Iterable[Label],
                    arrows: Mapping[Label, Tuple[Label, Label]],
                    identity: Mapping[Label, Label],
                    composition: Mapping[Tuple[Label, Label], Label]) -> None:
    for x in objects:
        ident = identity.get(x)
        if ident is None or arrows.get(ident) != (x, x):
            report.add(x, f"{rule}:identity", f"identity {ident!r} missing or with the wrong ends")
    outgoing = defaultdict(list)
    for f, (s, _) in arrows.items():
        outgoing[s].append(f)
    for f, (s, t) in arrows.items():
        for g in outgoing[t]:
            fg = composition.get((f, g))
            if fg is None:
                report.add((f, g), f"{rule}:totality", "missing composite")
            elif arrows.get(fg) != (s, arrows[g][1]):
                report.add((f, g), f"{rule}:totality", f"composite {fg!r} has the wrong ends")
    for (f, g) in composition:
        if f not in arrows or g not in arrows or arrows[f][1] != arrows[g][0]:
            report.add((f, g), f"{rule}:totality", "entry for cells that do not meet")
    for f, (s, t) in arrows.items():
        if composition.get((identity.get(s), f)) != f or composition.get((f, identity.get(t))) != f:
            report.add(f, f"{rule}:unit", "identities are not units")
    for f, (s, t) in arrows.items():
        for g in outgoing[t]:
            fg = composition.get((f, g))
            for h in outgoing[arrows[g][1]]:
                gh = composition.get((g, h))
                if fg is None or gh is None:
                    continue
                if composition.get((fg, h)) != composition.get((f, gh)):
                    report.add((f, g, h), f"{rule}:associativity", "bracketings differ")


def validate_double(d: FiniteDoubleCat) -> Report:
    """Check both categories of cells, square boundaries, units, both square
    compositions, interchange and the marking.
    """
    report = Report(f"double category {d.name}".strip())
    _check_category(report, "vertical", d.objects, d.vcells, d.vertical_identity, d.vertical_composition)
    _check_category(report, "horizontal", d.objects, d.hcells, d.horizontal_identity, d.horizontal_composition)
    if not report.ok:
        return report

    for alpha, b in d.squares.items():
        if (d.hsrc(b.top) != d.vsrc(b.left) or d.htgt(b.top) != d.vsrc(b.right)
                or d.hsrc(b.bottom) != d.vtgt(b.left) or d.htgt(b.bottom) != d.vtgt(b.right)):
            report.add(alpha, "square-boundary", "corners do not match")
    for h in d.hcells:
        unit = d.square_identity_v.get(h)
        if unit is None or d.squares.get(unit) != Boundary(h, h, d.vid(d.hsrc(h)), d.vid(d.htgt(h))):
            report.add(h, "units", "vertical identity square missing or with the wrong boundary")
    for f in d.vcells:
        unit = d.square_identity_h.get(f)
        if unit is None or d.squares.get(unit) != Boundary(d.hid(d.vsrc(f)), d.hid(d.vtgt(f)), f, f):
            report.add(f, "units", "horizontal identity square missing or with the wrong boundary")
    for a in d.objects:
        if d.square_identity_v.get(d.hid(a)) != d.square_identity_h.get(d.vid(a)):
            report.add(a, "units", "the two identity squares on an object differ")
    if not report.ok:
        return report

    by_top = {alpha: (b.top, b.bottom) for alpha, b in d.squares.items()}
    by_side = {alpha: (b.left, b.right) for alpha, b in d.squares.items()}
    _check_category(report, "square-vertical", d.hcells, by_top, d.square_identity_v, d.square_vertical_composition)
    _check_category(report, "square-horizontal", d.vcells, by_side, d.square_identity_h, d.square_horizontal_composition)
    # Interchange needs total square compositions; failed laws alone do not stop it
    if any(rule.endswith((":identity", ":totality")) for rule in report.rules()):
        return report

    for (alpha, beta), gamma in d.square_vertical_composition.items():
        a, b, c = d.boundary(alpha), d.boundary(beta), d.boundary(gamma)
        if (c.left, c.right) != (d.vcompose(a.left, b.left), d.vcompose(a.right, b.right)):
            report.add((alpha, beta), "square-boundary", "sides of the stacked square are not composites")
    for (alpha, beta), gamma in d.square_horizontal_composition.items():
        a, b, c = d.boundary(alpha), d.boundary(beta), d.boundary(gamma)
        if (c.top, c.bottom) != (d.hcompose(a.top, b.top), d.hcompose(a.bottom, b.bottom)):
            report.add((alpha, beta), "square-boundary", "top and bottom of the pasted square are not composites")
    for (f, g), fg in d.vertical_composition.items():
        if d.square_vertical_composition.get((d.unit_h(f), d.unit_h(g))) != d.unit_h(fg):
            report.add((f, g), "unit-functoriality", "I^h of a composite is not the stacked units")
    for (h, k), hk in d.horizontal_composition.items():
        if d.square_horizontal_composition.get((d.unit_v(h), d.unit_v(k))) != d.unit_v(hk):
            report.add((h, k), "unit-functoriality", "I^v of a composite is not the pasted units")

    beside_pairs = list(d.square_horizontal_composition.items())
    by_top_pair = defaultdict(list)
    for (gamma, delta), value in beside_pairs:
        by_top_pair[(d.boundary(gamma).top, d.boundary(delta).top)].append((gamma, delta))
    for (alpha, beta), upper in beside_pairs:
        key = (d.boundary(alpha).bottom, d.boundary(beta).bottom)
        for gamma, delta in by_top_pair.get(key, ()):
            lower = d.square_horizontal_composition[(gamma, delta)]
            left = d.square_vertical_composition.get((upper, lower))
            right = d.square_horizontal_composition.get((d.stack(alpha, gamma), d.stack(beta, delta)))
            if left != right:
                report.add((alpha, beta, gamma, delta), "interchange", "stacking and pasting do not interchange")

    if d.is_marked:
        report.merge(marking_report(d))
    report.facts["sizes"] = {"objects": len(d.objects), "vcells": len(d.vcells),
                             "hcells": len(d.hcells), "squares": len(d.squares)}
    return report


def marking_report(d: FiniteDoubleCat) -> Report:
    """Units marked, marking closed under all compositions, sides of marked squares marked."""
    report = Report("marking")
    for a in d.objects:
        if not d.is_marked_vcell(d.vid(a)):
            report.add(a, "marking", "vertical identity is not marked")
    for h in d.hcells:
        if not d.is_marked_square(d.unit_v(h)):
            report.add(h, "marking", "vertical identity square is not marked")
    for f in d.marked_vcells or ():
        if not d.is_marked_square(d.unit_h(f)):
            report.add(f, "marking", "horizontal identity square of a marked cell is not marked")
    for (f, g), fg in d.vertical_composition.items():
        if d.is_marked_vcell(f) and d.is_marked_vcell(g) and not d.is_marked_vcell(fg):
            report.add((f, g), "marking", "composite of marked vertical cells is not marked")
    for table in (d.square_vertical_composition, d.square_horizontal_composition):
        for (alpha, beta), gamma in table.items():
            if d.is_marked_square(alpha) and d.is_marked_square(beta) and not d.is_marked_square(gamma):
                report.add((alpha, beta), "marking", "composite of marked squares is not marked")
    for alpha in d.marked_squares or ():
        b = d.boundary(alpha)
        if not (d.is_marked_vcell(b.left) and d.is_marked_vcell(b.right)):
            report.add(alpha, "marking", "marked square with an unmarked side")
    return report


# -- companions ------------------------------------------------------------------

def is_companion_triple(d: FiniteDoubleCat, triple: CompanionTriple) -> bool:
    """Boundaries of ψ and φ plus both triangle equations."""
    f, fb = triple.vcell, triple.companion
    a, b = d.vsrc(f), d.vtgt(f)
    if d.hcells.get(fb) != (a, b):
        return False
    if d.boundary(triple.unit) != Boundary(d.hid(a), fb, d.vid(a), f):
        return False
    if d.boundary(triple.counit) != Boundary(fb, d.hid(b), f, d.vid(b)):
        return False
    try:
        return (d.beside(triple.unit, triple.counit) == d.unit_v(fb)
                and d.stack(triple.unit, triple.counit) == d.unit_h(f))
    except InvalidCategoryError:
        return False


def find_companions(d: FiniteDoubleCat, f: Label) -> List[CompanionTriple]:
    """Every (f̄, ψ, φ) satisfying both triangle equations, in table order."""
    a, b = d.vsrc(f), d.vtgt(f)
    found = []
    for fb, ends in d.hcells.items():
        if ends != (a, b):
            continue
        for unit in d.squares_with(d.hid(a), fb, d.vid(a), f):
            for counit in d.squares_with(fb, d.hid(b), f, d.vid(b)):
                triple = CompanionTriple(f, fb, unit, counit)
                if is_companion_triple(d, triple):
                    found.append(triple)
    return found


def companion_table(d: FiniteDoubleCat) -> Dict[Label, List[CompanionTriple]]:
    return {f: find_companions(d, f) for f in d.vcells}


def is_accompanied(d: FiniteDoubleCat) -> bool:
    return all(find_companions(d, f) for f in d.vcells)


def companion_of_composite(d: FiniteDoubleCat, fdata: CompanionTriple, gdata: CompanionTriple) -> CompanionTriple:
    """Companion data of f then g, pasted from the data of f and g.

    Raises:
        NotComposableError: If f and g do not meet
        CompanionError: If the pasted squares fail a triangle equation
    """
    f, g = fdata.vcell, gdata.vcell
    fg = d.vcompose(f, g)
    companion = d.hcompose(fdata.companion, gdata.companion)
    unit = d.paste([[fdata.unit, d.unit_h(f)],
                    [d.unit_v(fdata.companion), gdata.unit]])
    counit = d.paste([[fdata.counit, d.unit_v(gdata.companion)],
                      [d.unit_h(g), gdata.counit]])
    triple = CompanionTriple(fg, companion, unit, counit)
    if not is_companion_triple(d, triple):
        raise CompanionError(f"pasted companion data of {fg!r} fails a triangle equation")
    return triple


def companion_uniqueness_check(d: FiniteDoubleCat, f: Label) -> Report:
    """Any two companion triples of f are related by a unique pair of inverse squares
    compatible with units and counits.
    """
    report = Report(f"companions of {f}")
    triples = find_companions(d, f)
    report.facts["triples"] = len(triples)
    if not triples:
        report.add(f, "companionable", "no companion")
        return report
    a, b = d.vsrc(f), d.vtgt(f)
    for one, two in itertools.product(triples, repeat=2):
        forward = d.beside(two.unit, one.counit)
        backward = d.beside(one.unit, two.counit)
        subject = (one.companion, two.companion)
        if d.stack(forward, backward) != d.unit_v(one.companion) or d.stack(backward, forward) != d.unit_v(two.companion):
            report.add(subject, "inverse", "mediating squares are not mutually inverse")
        if d.stack(one.unit, forward) != two.unit or d.stack(forward, two.counit) != one.counit:
            report.add(subject, "compatible", "mediating square does not carry unit to unit and counit to counit")
        rivals = [m for m in d.squares_with(one.companion, two.companion, d.vid(a), d.vid(b))
                  if d.stack(one.unit, m) == two.unit and d.stack(m, two.counit) == one.counit]
        if rivals != [forward]:
            report.add(subject, "unique", f"{len(rivals)} compatible mediating squares")
    return report


# -- bicartesian squares -----------------------------------------------------------

def is_vertically_invertible(d: FiniteDoubleCat, alpha: Label) -> bool:
    b = d.boundary(alpha)
    for beta in d.squares_with(b.bottom, b.top):
        try:
            if d.stack(alpha, beta) == d.unit_v(b.top) and d.stack(beta, alpha) == d.unit_v(b.bottom):
                return True
        except (InvalidCategoryError, NotComposableError):
            continue
    return False


def transpose(d: FiniteDoubleCat, alpha: Label, source: CompanionTriple, target: CompanionTriple) -> Label:
    """ψ_s | α | φ_t: the globular square from top·t̄ to s̄·bottom."""
    return d.paste([[source.unit, alpha, target.counit]])


def is_bicartesian(d: FiniteDoubleCat, alpha: Label, reading: str = "transpose",
                   companions: Optional[Mapping[Label, List[CompanionTriple]]] = None) -> bool:
    """Whether α is bicartesian.

    The "transpose" reading asks for a vertically invertible transpose; the
    "shape" reading asks for α = φ_s | I^v_h | ψ_t literally, for some h.
    """
    if reading not in READINGS:
        raise ValueError(f"reading must be one of {', '.join(READINGS)}")
    table = companions if companions is not None else {}
    b = d.boundary(alpha)
    left = table[b.left] if b.left in table else find_companions(d, b.left)
    right = table[b.right] if b.right in table else find_companions(d, b.right)
    if not left or not right:
        return False
    if reading == "transpose":
        return any(is_vertically_invertible(d, transpose(d, alpha, s, t)) for s in left for t in right)
    for h, (x, y) in d.hcells.items():
        if x != d.vtgt(b.left) or y != d.vsrc(b.right):
            continue
        for s, t in itertools.product(left, right):
            if d.paste([[s.counit, d.unit_v(h), t.unit]]) == alpha:
                return True
    return False


def bicartesian_squares(d: FiniteDoubleCat, reading: str = "transpose") -> List[Label]:
    table = companion_table(d)
    return [alpha for alpha in d.squares if is_bicartesian(d, alpha, reading, table)]


def compare_bicartesian_readings(d: FiniteDoubleCat) -> Report:
    """List squares on which the transpose and shape readings disagree."""
    report = Report("bicartesian readings")
    transposed = set(bicartesian_squares(d, "transpose"))
    shaped = set(bicartesian_squares(d, "shape"))
    for alpha in d.squares:
        if (alpha in transposed) != (alpha in shaped):
            which = "transpose" if alpha in transposed else "shape"
            report.add(alpha, "reading", f"bicartesian only in the {which} reading")
    report.facts["transpose"] = len(transposed)
    report.facts["shape"] = len(shaped)
    if not report.ok:
        logger.warning("bicartesian readings differ on %d squares of %s", len(report.violations), d.name)
    return report


def companion_marking(d: FiniteDoubleCat) -> FiniteDoubleCat:
    """Mark companionable vertical cells and bicartesian squares.

    Raises:
        MarkingError: If the marking is not closed
    """
    table = companion_table(d)
    vcells = [f for f, triples in table.items() if triples]
    squares = [alpha for alpha in d.squares if is_bicartesian(d, alpha, "transpose", table)]
    marked = d.with_marking(vcells, squares)
    report = marking_report(marked)
    if not report.ok:
        raise MarkingError(f"companion marking is not closed:\n{report}")
    logger.info("companion marking of %s: %d/%d vertical cells, %d/%d squares",
                d.name, len(vcells), len(d.vcells), len(squares), len(d.squares))
    return marked


def _companion_or_raise(d: FiniteDoubleCat, f: Label, triple: Optional[CompanionTriple]) -> CompanionTriple:
    if triple is not None:
        if triple.vcell != f:
            raise CompanionError(f"companion data given for {triple.vcell!r}, needed for {f!r}")
        return triple
    found = find_companions(d, f)
    if not found:
        raise CompanionError(f"vertical cell {f!r} has no companion")
    return found[0]


def cocartesian_lift(d: FiniteDoubleCat, u: Label, t: Label, triple: Optional[CompanionTriple] = None) -> Label:
    """I^v_u | ψ_t: the marked square with top u over (identity, t).

    The horizontal cell comes first and the vertical cell second. Companion
    data for t is the optional last argument.

    Args:
        d: The double category
        u: Horizontal cell along the top of the lift
        t: Vertical cell on the right of the lift
        triple: Companion data for t; the first of find_companions(d, t) when omitted

    Raises:
        NotComposableError: If u does not end where t starts
        CompanionError: If t has no companion
    """
    if d.htgt(u) != d.vsrc(t):
        raise NotComposableError(f"{u!r} does not end at the source of {t!r}")
    return d.beside(d.unit_v(u), _companion_or_raise(d, t, triple).unit)


def cartesian_lift(d: FiniteDoubleCat, u: Label, s: Label, triple: Optional[CompanionTriple] = None) -> Label:
    """φ_s | I^v_u: the marked square with bottom u over (s, identity).

    Arguments are ordered as in cocartesian_lift.

    Args:
        d: The double category
        u: Horizontal cell along the bottom of the lift
        s: Vertical cell on the left of the lift
        triple: Companion data for s; the first of find_companions(d, s) when omitted

    Raises:
        NotComposableError: If u does not start where s ends
        CompanionError: If s has no companion
    """
    if d.hsrc(u) != d.vtgt(s):
        raise NotComposableError(f"{u!r} does not start at the target of {s!r}")
    return d.beside(_companion_or_raise(d, s, triple).counit, d.unit_v(u))


# -- two-sided fibrations ---------------------------------------------------------

def _factorizations(d: FiniteDoubleCat) -> Dict[Label, List[Tuple[Label, Label]]]:
    found = defaultdict(list)
    for (f, g), fg in d.vertical_composition.items():
        found[fg].append((f, g))
    return found


def _globular_isos(d: FiniteDoubleCat, top: Label, bottom: Label) -> List[Label]:
    """Vertically invertible globular squares from top to bottom."""
    x, y = d.hcells[top]
    return [s for s in d.squares_with(top, bottom, d.vid(x), d.vid(y)) if is_vertically_invertible(d, s)]


def _unique(found: List[Any], mediators: Callable[[Any, Any], List[Label]], up_to_iso: bool) -> bool:
    """One entry, or with up_to_iso, any two entries joined by exactly one mediating square."""
    if not up_to_iso or not found:
        return len(found) == 1
    return all(len(mediators(first, second)) == 1 for first in found for second in found)


def check_two_sided_fibration(d: FiniteDoubleCat, up_to_iso: bool = True) -> Report:
    """Unique marked lifts and factorizations for D_1 → D_0 × D_0.

    The vertical category counts as fully marked; the square marking is read
    off d.

    (1a) a unique marked square with given top over (identity, t);
    (1b) a unique marked square with given bottom over (s, identity);
    (2a) every square splits uniquely as a marked lift at its top followed by
         a square over the rest, for every first factor of its right side;
    (2b) dually at its bottom, for every last factor of its left side;
    factors of marked squares are marked.

    With up_to_iso, unique means unique up to a unique vertically invertible
    globular square on the free side: two lifts λ, λ' are related by exactly
    one such σ with λ' = λ ; σ (or σ ; λ for (1b)), and two factorizations
    (μ, ξ), (μ', ξ') by exactly one σ with μ' = μ ; σ and ξ = σ ; ξ'. Without
    it the lifts and factorizations must be unique on the nose.
    """
    report = Report(f"two-sided fibration {d.name}".strip())
    if not d.is_marked:
        report.add(d.name, "marking", "double category is not marked")
        return report

    def below(a, b):
        return [s for s in _globular_isos(d, d.boundary(a).bottom, d.boundary(b).bottom) if d.stack(a, s) == b]

    def above(a, b):
        return [s for s in _globular_isos(d, d.boundary(b).top, d.boundary(a).top) if d.stack(s, a) == b]

    for t in d.vcells:
        for u, (x, y) in d.hcells.items():
            if y == d.vsrc(t):
                lifts = [a for a in d.squares_with(top=u, left=d.vid(x), right=t) if d.is_marked_square(a)]
                if not _unique(lifts, below, up_to_iso):
                    report.add((u, t), "1a", f"{len(lifts)} marked lifts")
            if x == d.vtgt(t):
                lifts = [a for a in d.squares_with(bottom=u, left=t, right=d.vid(y)) if d.is_marked_square(a)]
                if not _unique(lifts, above, up_to_iso):
                    report.add((u, t), "1b", f"{len(lifts)} marked lifts")

    def split_below(p, q):
        return [s for s in below(p[0], q[0]) if d.stack(s, q[1]) == p[1]]

    def split_above(p, q):
        return [s for s in above(p[1], q[1]) if d.stack(q[0], s) == p[0]]

    splits = _factorizations(d)
    for gamma, b in d.squares.items():
        for first, rest in splits.get(b.right, ()):
            pairs = []
            for mu in d.squares_with(top=b.top, left=d.vid(d.vsrc(b.left)), right=first):
                if not d.is_marked_square(mu):
                    continue
                for xi in d.squares_with(top=d.boundary(mu).bottom, bottom=b.bottom, left=b.left, right=rest):
                    if d.stack(mu, xi) == gamma:
                        pairs.append((mu, xi))
            if not _unique(pairs, split_below, up_to_iso):
                report.add((gamma, first), "2a", f"{len(pairs)} factorizations")
            elif d.is_marked_square(gamma) and not all(d.is_marked_square(xi) for _, xi in pairs):
                report.add((gamma, first), "2a", "factor of a marked square is not marked")
        for rest, last in splits.get(b.left, ()):
            pairs = []
            for mu in d.squares_with(bottom=b.bottom, left=last, right=d.vid(d.vtgt(b.right))):
                if not d.is_marked_square(mu):
                    continue
                for xi in d.squares_with(top=b.top, bottom=d.boundary(mu).top, left=rest, right=b.right):
                    if d.stack(xi, mu) == gamma:
                        pairs.append((xi, mu))
            if not _unique(pairs, split_above, up_to_iso):
                report.add((gamma, last), "2b", f"{len(pairs)} factorizations")
            elif d.is_marked_square(gamma) and not all(d.is_marked_square(xi) for xi, _ in pairs):
                report.add((gamma, last), "2b", "factor of a marked square is not marked")
    report.facts["marked_squares"] = len(d.marked_squares)
    report.facts["up_to_iso"] = up_to_iso
    return report


def extract_companions(d: FiniteDoubleCat) -> Dict[Label, CompanionTriple]:
    """Read companion data off a marked double category with unique lifts.

    f̄ is the bottom of the marked lift of hid(a) along f; φ is the unique
    square completing ψ to I^h_f.

    Raises:
        CompanionError: If a lift is missing or not unique, or a triangle fails
    """
    triples = {}
    for f in d.vcells:
        a, b = d.vsrc(f), d.vtgt(f)
        lifts = [x for x in d.squares_with(top=d.hid(a), left=d.vid(a), right=f) if d.is_marked_square(x)]
        if len(lifts) != 1:
            raise CompanionError(f"{len(lifts)} marked lifts of the identity at {a!r} along {f!r}")
        unit = lifts[0]
        companion = d.boundary(unit).bottom
        factors = [x for x in d.squares_with(companion, d.hid(b), f, d.vid(b))
                   if d.stack(unit, x) == d.unit_h(f)]
        if len(factors) != 1:
            raise CompanionError(f"{len(factors)} counit candidates for {f!r}")
        triple = CompanionTriple(f, companion, unit, factors[0])
        if not is_companion_triple(d, triple):
            raise CompanionError(f"extracted data for {f!r} fails a triangle equation")
        triples[f] = triple
    return triples


# -- completeness ---------------------------------------------------------------

def vertical_isomorphisms(d: FiniteDoubleCat) -> List[Label]:
    found = []
    for f, (a, b) in d.vcells.items():
        for g, (x, y) in d.vcells.items():
            if (x, y) == (b, a) and d.vcompose(f, g) == d.vid(a) and d.vcompose(g, f) == d.vid(b):
                found.append(f)
                break
    return found


def _globular_iso(d: FiniteDoubleCat, h: Label, k: Label) -> bool:
    if h == k:
        return True
    x, y = d.hcells[h]
    return any(is_vertically_invertible(d, alpha) for alpha in d.squares_with(h, k, d.vid(x), d.vid(y)))


def horizontal_equivalences(d: FiniteDoubleCat) -> List[Label]:
    """Horizontal cells u with some v such that u·v and v·u are isomorphic to identities
    through vertically invertible globular squares.
    """
    found = []
    for u, (a, b) in d.hcells.items():
        for v, ends in d.hcells.items():
            if ends == (b, a) and _globular_iso(d, d.hcompose(u, v), d.hid(a)) \
                    and _globular_iso(d, d.hcompose(v, u), d.hid(b)):
                found.append(u)
                break
    return found


def completeness_report(d: FiniteDoubleCat) -> Report:
    """(a) distinct vertical cells have disjoint companion sets; (b) every horizontal
    equivalence is isomorphic to the companion of a vertical isomorphism.
    """
    report = Report(f"completeness {d.name}".strip())
    table = companion_table(d)
    owners = defaultdict(list)
    for f, triples in table.items():
        for h in sorted({t.companion for t in triples}, key=str):
            owners[h].append(f)
    for h, fs in owners.items():
        if len(fs) > 1:
            report.add(h, "injective", f"companion of {len(fs)} vertical cells")
    isos = vertical_isomorphisms(d)
    iso_companions = {t.companion for f in isos for t in table[f]}
    for u in horizontal_equivalences(d):
        if not any(d.hcells[c] == d.hcells[u] and _globular_iso(d, u, c) for c in iso_companions):
            report.add(u, "equivalences", "horizontal equivalence not isomorphic to a companion of a vertical isomorphism")
    return report


def is_complete(d: FiniteDoubleCat) -> bool:
    return completeness_report(d).ok


def every_horizontal_is_companion(d: FiniteDoubleCat) -> bool:
    companions = {t.companion for triples in companion_table(d).values() for t in triples}
    return all(h in companions for h in d.hcells)


# -- constructions ------------------------------------------------------------------

def vertical_double(c: FiniteStrictNCat) -> FiniteDoubleCat:
    """The 1-cells of c as vertical cells; only identity horizontal cells and squares."""
    if c.max_dim < 1:
        raise InvalidCategoryError("vertical_double needs at least 1-cells")
    vcells = {f: (c.src(f), c.tgt(f)) for f in c.cells(1)}
    hcells = {("h", a): (a, a) for a in c.objects}
    squares = {("I", f): Boundary(("h", s), ("h", t), f, f) for f, (s, t) in vcells.items()}
    vcomp = {(f, g): v for (i, f, g), v in c.composition_table().items() if i == 0 and f in vcells}
    return FiniteDoubleCat(
        c.objects, vcells, hcells, squares,
        {a: c.identity(a) for a in c.objects}, {a: ("h", a) for a in c.objects},
        vcomp, {(("h", a), ("h", a)): ("h", a) for a in c.objects},
        {("h", a): ("I", c.identity(a)) for a in c.objects}, {f: ("I", f) for f in vcells},
        {(("I", f), ("I", g)): ("I", v) for (f, g), v in vcomp.items()},
        {(("I", f), ("I", f)): ("I", f) for f in vcells},
        name=f"vertical({c.name})",
    )


def disjoint_union(d: FiniteDoubleCat, e: FiniteDoubleCat) -> FiniteDoubleCat:
    """Cells of d tagged 0 and cells of e tagged 1."""
    parts = [(0, d), (1, e)]

    def cells(attr):
        return {(n, c): ((n, s), (n, t)) for n, x in parts for c, (s, t) in getattr(x, attr).items()}

    def labels(attr):
        return {(n, a): (n, b) for n, x in parts for a, b in getattr(x, attr).items()}

    def table(attr):
        return {((n, a), (n, b)): (n, c) for n, x in parts for (a, b), c in getattr(x, attr).items()}

    squares = {}
    for n, x in parts:
        for alpha, b in x.squares.items():
            squares[(n, alpha)] = Boundary((n, b.top), (n, b.bottom), (n, b.left), (n, b.right))
    marked_v = marked_s = None
    if d.is_marked and e.is_marked:
        marked_v = [(n, f) for n, x in parts for f in x.marked_vcells]
        marked_s = [(n, a) for n, x in parts for a in x.marked_squares]
    return FiniteDoubleCat(
        [(n, a) for n, x in parts for a in x.objects],
        cells("vcells"), cells("hcells"), squares,
        labels("vertical_identity"), labels("horizontal_identity"),
        table("vertical_composition"), table("horizontal_composition"),
        labels("square_identity_v"), labels("square_identity_h"),
        table("square_vertical_composition"), table("square_horizontal_composition"),
        marked_v, marked_s, name=f"{d.name}+{e.name}",
    )


def double_to_dict(d: FiniteDoubleCat) -> Dict[str, Any]:
    """JSON document; labels are written with str()."""
    def pairs(table):
        return [[str(a), str(b), str(v)] for (a, b), v in table.items()]

    return {
        "name": d.name,
        "objects": [str(a) for a in d.objects],
        "vcells": {str(f): [str(s), str(t)] for f, (s, t) in d.vcells.items()},
        "hcells": {str(h): [str(s), str(t)] for h, (s, t) in d.hcells.items()},
        "squares": {str(a): [str(b.top), str(b.bottom), str(b.left), str(b.right)] for a, b in d.squares.items()},
        "vertical_identity": {str(a): str(f) for a, f in d.vertical_identity.items()},
        "horizontal_identity": {str(a): str(h) for a, h in d.horizontal_identity.items()},
        "vertical_composition": pairs(d.vertical_composition),
        "horizontal_composition": pairs(d.horizontal_composition),
        "square_identity_v": {str(h): str(a) for h, a in d.square_identity_v.items()},
        "square_identity_h": {str(f): str(a) for f, a in d.square_identity_h.items()},
        "square_vertical_composition": pairs(d.square_vertical_composition),
        "square_horizontal_composition": pairs(d.square_horizontal_composition),
        "marked_vcells": None if d.marked_vcells is None else sorted(str(f) for f in d.marked_vcells),
        "marked_squares": None if d.marked_squares is None else sorted(str(a) for a in d.marked_squares),
    }


def double_from_dict(data: Mapping[str, Any]) -> FiniteDoubleCat:
    def pairs(key):
        return {(a, b): v for a, b, v in data.get(key, [])}

    try:
        return FiniteDoubleCat(
            data["objects"],
            {f: tuple(ends) for f, ends in data["vcells"].items()},
            {h: tuple(ends) for h, ends in data["hcells"].items()},
            {a: Boundary(*sides) for a, sides in data["squares"].items()},
            data["vertical_identity"], data["horizontal_identity"],
            pairs("vertical_composition"), pairs("horizontal_composition"),
            data["square_identity_v"], data["square_identity_h"],
            pairs("square_vertical_composition"), pairs("square_horizontal_composition"),
            data.get("marked_vcells"), data.get("marked_squares"), name=data.get("name", ""),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise InvalidCategoryError(f"malformed double category document: {e}")
