"""
Augmented directed complexes.

An Adc is a finitely generated chain complex of free abelian groups with a
distinguished basis and an augmentation on degree 0. Everything is exact
integer arithmetic. The module provides the Gray tensor product, dualities,
suspensions, wedges, pushouts along basis inclusions, Steiner's basis
conditions and the cells of nu(K) together with their composition.

Basis element ids are plain strings. Derived complexes build their ids
from the ids of their inputs:

    tensor        "b⊗c" (operands containing ⊗ are parenthesized)
    suspension    "{0}", "{1}", ... for the points, "[b,1]" or "[b,1]^k"
    path [n]      "{0}".."{n}" and edges "e0".."e{n-1}"
    wedge         "l.b" and "r.c"
"""

import itertools
import logging
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import networkx as nx

import config
from errors import InvalidComplexError, NotComposableError, PushoutError
from reports import Report

logger = logging.getLogger(__name__)

POINT_ID = "•"


def tensor_id(b: str, c: str) -> str:
    """Id of the basis element b⊗c of a tensor product."""
    return f"{_wrap(b)}⊗{_wrap(c)}"


def _wrap(x: str) -> str:
    return f"({x})" if "⊗" in x else x


def suspension_id(b: str, block: Optional[int] = None) -> str:
    """Id of [b,1] inside a suspension, or of [b,1] in block k of [C_0,...,C_{m-1}]."""
    return f"[{b},1]" if block is None else f"[{b},1]^{block}"


def vertex_id(k: int) -> str:
    return f"{{{k}}}"


def edge_id(i: int) -> str:
    return f"e{i}"


class Chain:
    """A finitely supported integer combination of basis elements of one degree.

    Chains are immutable and hashable. Zero coefficients are never stored.
    """

    __slots__ = ("degree", "_terms")

    def __init__(self, degree: int, terms: Optional[Mapping[str, int]] = None):
        self.degree = degree
        self._terms: Dict[str, int] = {}
        for key, coeff in (terms or {}).items():
            if isinstance(coeff, bool) or not isinstance(coeff, int):
                raise InvalidComplexError(f"coefficient of {key!r} must be an integer, got {coeff!r}")
            if coeff:
                self._terms[key] = coeff

    @classmethod
    def unit(cls, element: str, degree: int) -> "Chain":
        return cls(degree, {element: 1})

    def coefficient(self, element: str) -> int:
        return self._terms.get(element, 0)

    def items(self) -> List[Tuple[str, int]]:
        return sorted(self._terms.items())

    def support(self) -> Tuple[str, ...]:
        return tuple(sorted(self._terms))

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def is_non_negative(self) -> bool:
        return all(coeff > 0 for coeff in self._terms.values())

    def max_coefficient(self) -> int:
        return max((abs(c) for c in self._terms.values()), default=0)

    def single(self) -> Optional[str]:
        """The element e when the chain is exactly 1·e, otherwise None."""
        if len(self._terms) == 1:
            (element, coeff), = self._terms.items()
            if coeff == 1:
                return element
        return None

    def positive_part(self) -> "Chain":
        return Chain(self.degree, {k: c for k, c in self._terms.items() if c > 0})

    def negative_part(self) -> "Chain":
        """The non-negative chain x⁻ with x = x⁺ - x⁻."""
        return Chain(self.degree, {k: -c for k, c in self._terms.items() if c < 0})

    def _combine(self, other: "Chain", sign: int) -> "Chain":
        if not isinstance(other, Chain):
            return NotImplemented
        if other.is_zero:
            return self
        if self.is_zero and sign == 1:
            return other
        if other.degree != self.degree and not self.is_zero:
            raise InvalidComplexError(f"cannot add chains of degrees {self.degree} and {other.degree}")
        terms = dict(self._terms)
        for key, coeff in other._terms.items():
            terms[key] = terms.get(key, 0) + sign * coeff
        return Chain(other.degree if self.is_zero else self.degree, terms)

    def __add__(self, other: "Chain") -> "Chain":
        return self._combine(other, 1)

    def __sub__(self, other: "Chain") -> "Chain":
        return self._combine(other, -1)

    def __neg__(self) -> "Chain":
        return Chain(self.degree, {k: -c for k, c in self._terms.items()})

    def __mul__(self, scalar: int) -> "Chain":
        return Chain(self.degree, {k: c * scalar for k, c in self._terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, Chain):
            return NotImplemented
        return self.degree == other.degree and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.degree, frozenset(self._terms.items())))

    def sort_key(self) -> Tuple:
        return (self.degree, tuple(self.items()))

    def to_json(self) -> List[Dict[str, Union[str, int]]]:
        return [{"id": k, "coeff": c} for k, c in self.items()]

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for key, coeff in self.items():
            magnitude = abs(coeff)
            term = key if magnitude == 1 else f"{magnitude}·{key}"
            if not parts:
                parts.append(term if coeff > 0 else f"-{term}")
            else:
                parts.append(f"{'+' if coeff > 0 else '-'} {term}")
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"Chain({self.degree}, {dict(self.items())!r})"


def sum_chains(degree: int, chains: Iterable[Chain]) -> Chain:
    total = Chain(degree)
    for chain in chains:
        total = total + chain
    return total


@dataclass(frozen=True)
class BasisElement:
    id: str
    degree: int


class Adc:
    """An augmented directed complex with a distinguished basis.

    Args:
        basis: BasisElement objects or (id, degree) pairs
        differential: Map from ids of positive degree to chains (or dicts) one degree lower
        augmentation: Map from degree-0 ids to integers; missing entries are 0
        endpoints: Optional designated (pt0, pt1) degree-0 elements, used by wedges
        name: Display name
    """

    def __init__(self, basis: Iterable[Union[BasisElement, Tuple[str, int]]],
                 differential: Optional[Mapping[str, Union[Chain, Mapping[str, int]]]] = None,
                 augmentation: Optional[Mapping[str, int]] = None,
                 endpoints: Optional[Tuple[str, str]] = None,
                 name: str = ""):
        self.name = name
        self._degrees: Dict[str, int] = {}
        for element in basis:
            ident, degree = (element.id, element.degree) if isinstance(element, BasisElement) else element
            if not isinstance(ident, str) or not ident:
                raise InvalidComplexError(f"basis ids must be non-empty strings, got {ident!r}")
            if isinstance(degree, bool) or not isinstance(degree, int) or degree < 0:
                raise InvalidComplexError(f"degree of {ident!r} must be a non-negative integer")
            if ident in self._degrees:
                raise InvalidComplexError(f"duplicate basis id {ident!r}")
            self._degrees[ident] = degree

        self._order = tuple(sorted(self._degrees, key=lambda i: (self._degrees[i], i)))
        by_degree: Dict[int, List[str]] = defaultdict(list)
        for ident in self._order:
            by_degree[self._degrees[ident]].append(ident)
        self._by_degree = {d: tuple(ids) for d, ids in by_degree.items()}

        self._differential: Dict[str, Chain] = {}
        for ident, value in (differential or {}).items():
            if ident not in self._degrees:
                raise InvalidComplexError(f"differential given for unknown element {ident!r}")
            degree = self._degrees[ident]
            chain = value if isinstance(value, Chain) else Chain(degree - 1, value)
            if degree == 0:
                if not chain.is_zero:
                    raise InvalidComplexError(f"degree-0 element {ident!r} cannot have a differential")
                continue
            if not chain.is_zero and chain.degree != degree - 1:
                raise InvalidComplexError(f"differential of {ident!r} has degree {chain.degree}")
            for target in chain.support():
                if self._degrees.get(target) != degree - 1:
                    raise InvalidComplexError(f"differential of {ident!r} refers to {target!r} outside degree {degree - 1}")
            if not chain.is_zero:
                self._differential[ident] = Chain(degree - 1, dict(chain.items()))

        self._augmentation: Dict[str, int] = {}
        for ident, value in (augmentation or {}).items():
            if self._degrees.get(ident) != 0:
                raise InvalidComplexError(f"augmentation given for {ident!r}, which is not of degree 0")
            if isinstance(value, bool) or not isinstance(value, int):
                raise InvalidComplexError(f"augmentation of {ident!r} must be an integer")
            if value:
                self._augmentation[ident] = value

        if endpoints is not None:
            endpoints = tuple(endpoints)
            if len(endpoints) != 2 or any(self._degrees.get(p) != 0 for p in endpoints):
                raise InvalidComplexError(f"endpoints {endpoints!r} must be two degree-0 elements")
        self.endpoints = endpoints

    def ids(self) -> Tuple[str, ...]:
        """All basis ids in canonical order (degree, then id)."""
        return self._order

    def elements(self) -> List[BasisElement]:
        return [BasisElement(i, self._degrees[i]) for i in self._order]

    def basis(self, degree: int) -> Tuple[str, ...]:
        return self._by_degree.get(degree, ())

    def degree(self, element: str) -> int:
        try:
            return self._degrees[element]
        except KeyError:
            raise InvalidComplexError(f"{element!r} is not a basis element of {self.name or 'the complex'}")

    @property
    def top_degree(self) -> int:
        return max(self._degrees.values(), default=0)

    def size_by_degree(self) -> Tuple[int, ...]:
        return tuple(len(self.basis(d)) for d in range(self.top_degree + 1)) if self._degrees else ()

    def __contains__(self, element: str) -> bool:
        return element in self._degrees

    def __len__(self) -> int:
        return len(self._degrees)

    def unit(self, element: str) -> Chain:
        return Chain.unit(element, self.degree(element))

    def boundary(self, element: str) -> Chain:
        degree = self.degree(element)
        return self._differential.get(element, Chain(degree - 1))

    def augmentation(self, element: str) -> int:
        return self._augmentation.get(element, 0)

    def differential(self, chain: Chain) -> Chain:
        """Linear extension of the differential."""
        total = Chain(chain.degree - 1)
        for element, coeff in chain.items():
            total = total + self.boundary(element) * coeff
        return total

    def augment(self, chain: Chain) -> int:
        return sum(self.augmentation(e) * c for e, c in chain.items())

    def plus(self, chain: Chain) -> Chain:
        """∂⁺: the positive part of the differential."""
        return self.differential(chain).positive_part()

    def minus(self, chain: Chain) -> Chain:
        """∂⁻: the negative part of the differential, as a non-negative chain."""
        return self.differential(chain).negative_part()

    def with_name(self, name: str) -> "Adc":
        return Adc(self.elements(), self._differential, self._augmentation, self.endpoints, name)

    def with_endpoints(self, endpoints: Optional[Tuple[str, str]]) -> "Adc":
        return Adc(self.elements(), self._differential, self._augmentation, endpoints, self.name)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Adc):
            return NotImplemented
        return (self._degrees == other._degrees
                and self._differential == other._differential
                and self._augmentation == other._augmentation)

    def __hash__(self) -> int:
        return hash(self._order)

    def __repr__(self) -> str:
        label = self.name or "Adc"
        return f"<{label} basis sizes {self.size_by_degree()}>"

    def to_dict(self) -> Dict:
        """JSON document: basis, differential and augmentation (plus endpoints when set)."""
        data = {
            "basis": [{"id": e.id, "degree": e.degree} for e in self.elements()],
            "differential": {i: self._differential[i].to_json() for i in self._order if i in self._differential},
            "augmentation": {i: self._augmentation.get(i, 0) for i in self.basis(0)},
        }
        if self.endpoints is not None:
            data["endpoints"] = list(self.endpoints)
        if self.name:
            data["name"] = self.name
        return data

    @classmethod
    def from_dict(cls, data: Mapping) -> "Adc":
        """Create an Adc from its JSON document.

        Raises:
            InvalidComplexError: If the document does not follow the schema
        """
        if not isinstance(data, Mapping) or "basis" not in data:
            raise InvalidComplexError("an Adc document needs a 'basis' list")
        try:
            basis = [(entry["id"], entry["degree"]) for entry in data["basis"]]
            differential = {
                ident: {term["id"]: term["coeff"] for term in terms}
                for ident, terms in data.get("differential", {}).items()
            }
        except (KeyError, TypeError) as e:
            raise InvalidComplexError(f"malformed Adc document: {e}")
        endpoints = data.get("endpoints")
        return cls(basis, differential, data.get("augmentation", {}),
                   tuple(endpoints) if endpoints else None, data.get("name", ""))


def validate(adc: Adc) -> Report:
    """Check ∂∂ = 0 and ε∂ = 0 on every basis element.

    Args:
        adc: Complex to check

    Returns:
        Report with one violation per offending basis element
    """
    report = Report(f"validate {adc.name}".strip())
    for element in adc.ids():
        degree = adc.degree(element)
        if degree >= 2:
            twice = adc.differential(adc.boundary(element))
            if not twice.is_zero:
                report.add(element, "boundary-squared", f"∂∂{element} = {twice}")
        elif degree == 1:
            value = adc.augment(adc.boundary(element))
            if value:
                report.add(element, "augmentation", f"ε∂{element} = {value}")
    report.facts["basis_sizes"] = list(adc.size_by_degree())
    return report


def _require_valid(*complexes: Adc) -> None:
    for adc in complexes:
        report = validate(adc)
        if not report.ok:
            raise InvalidComplexError(f"invalid complex {adc.name or ''}: {report.violations[0].detail}")


# -- constructors ----------------------------------------------------------

def point_adc() -> Adc:
    """The terminal complex [0]."""
    return Adc([(POINT_ID, 0)], augmentation={POINT_ID: 1}, endpoints=(POINT_ID, POINT_ID), name="[0]")


def vertex_adc(name: str) -> Adc:
    return Adc([(name, 0)], augmentation={name: 1}, endpoints=(name, name), name=name)


def discrete_adc(names: Sequence[str]) -> Adc:
    return Adc([(n, 0) for n in names], augmentation={n: 1 for n in names}, name="discrete")


def path_adc(n: int) -> Adc:
    """The complex of the poset [n]: vertices {0}..{n}, edges e_i from {i} to {i+1}."""
    basis = [(vertex_id(k), 0) for k in range(n + 1)] + [(edge_id(i), 1) for i in range(n)]
    differential = {edge_id(i): {vertex_id(i + 1): 1, vertex_id(i): -1} for i in range(n)}
    return Adc(basis, differential, {vertex_id(k): 1 for k in range(n + 1)},
               endpoints=(vertex_id(0), vertex_id(n)), name=f"[{n}]")


def suspension_sum(blocks: Sequence[Adc], name: str = "") -> Adc:
    """The complex of [C_0, ..., C_{m-1}]: m suspended blocks glued end to end.

    Block k contributes [b,1]^k in degree |b|+1 between the points {k} and {k+1}
    (plain [b,1] when m = 1).

    Raises:
        InvalidComplexError: If a block has a degree-0 element of augmentation other than 1
    """
    m = len(blocks)
    basis = [(vertex_id(k), 0) for k in range(m + 1)]
    differential: Dict[str, Dict[str, int]] = {}
    for k, block in enumerate(blocks):
        tag = None if m == 1 else k
        for b in block.ids():
            degree = block.degree(b)
            ident = suspension_id(b, tag)
            basis.append((ident, degree + 1))
            if degree == 0:
                if block.augmentation(b) != 1:
                    raise InvalidComplexError(f"cannot suspend {b!r}: augmentation {block.augmentation(b)} is not 1")
                differential[ident] = {vertex_id(k + 1): 1, vertex_id(k): -1}
            else:
                differential[ident] = {suspension_id(x, tag): c for x, c in block.boundary(b).items()}
    return Adc(basis, differential, {vertex_id(k): 1 for k in range(m + 1)},
               endpoints=(vertex_id(0), vertex_id(m)), name=name)


def suspend_adc(k: Adc) -> Adc:
    """The suspension [K, 1]."""
    return suspension_sum([k], name=f"[{k.name},1]" if k.name else "")


def globe_adc(n: int) -> Adc:
    adc = point_adc()
    for _ in range(n):
        adc = suspend_adc(adc)
    return adc.with_name(f"D{n}")


def oriental2_adc() -> Adc:
    """The 2-simplex: a 2-cell from the edge 02 to the composite of 01 and 12."""
    basis = [("{0}", 0), ("{1}", 0), ("{2}", 0), ("01", 1), ("02", 1), ("12", 1), ("012", 2)]
    differential = {
        "01": {"{1}": 1, "{0}": -1},
        "12": {"{2}": 1, "{1}": -1},
        "02": {"{2}": 1, "{0}": -1},
        "012": {"01": 1, "12": 1, "02": -1},
    }
    return Adc(basis, differential, {"{0}": 1, "{1}": 1, "{2}": 1},
               endpoints=("{0}", "{2}"), name="Δ2")


def wedge_adc(k: Adc, l: Adc) -> Adc:
    """Glue the endpoint pt1 of k to the endpoint pt0 of l.

    Raises:
        InvalidComplexError: If either complex has no designated endpoints
    """
    if k.endpoints is None or l.endpoints is None:
        raise InvalidComplexError("wedge needs designated endpoints on both complexes")
    left = {b: f"l.{b}" for b in k.ids()}
    right = {c: f"r.{c}" for c in l.ids()}
    right[l.endpoints[0]] = left[k.endpoints[1]]

    basis = [(left[b], k.degree(b)) for b in k.ids()]
    basis += [(right[c], l.degree(c)) for c in l.ids() if c != l.endpoints[0]]
    differential = {}
    augmentation = {}
    for adc, rename in ((k, left), (l, right)):
        for b in adc.ids():
            if adc.degree(b) > 0:
                differential[rename[b]] = {rename[x]: c for x, c in adc.boundary(b).items()}
            elif rename[b] not in augmentation:
                augmentation[rename[b]] = adc.augmentation(b)
    name = f"{k.name}∨{l.name}" if k.name and l.name else ""
    return Adc(basis, differential, augmentation,
               endpoints=(left[k.endpoints[0]], right[l.endpoints[1]]), name=name)


def tensor(k: Adc, l: Adc) -> Adc:
    """Gray tensor product with ∂(b⊗c) = ∂b⊗c + (-1)^|b| b⊗∂c and ε(b⊗c) = ε(b)ε(c).

    Raises:
        InvalidComplexError: If either input fails validate
    """
    _require_valid(k, l)
    basis = []
    differential: Dict[str, Dict[str, int]] = {}
    augmentation = {}
    for b in k.ids():
        for c in l.ids():
            ident = tensor_id(b, c)
            degree = k.degree(b) + l.degree(c)
            basis.append((ident, degree))
            if degree == 0:
                augmentation[ident] = k.augmentation(b) * l.augmentation(c)
                continue
            terms: Dict[str, int] = defaultdict(int)
            for x, coeff in k.boundary(b).items():
                terms[tensor_id(x, c)] += coeff
            sign = -1 if k.degree(b) % 2 else 1
            for y, coeff in l.boundary(c).items():
                terms[tensor_id(b, y)] += sign * coeff
            differential[ident] = dict(terms)
    endpoints = None
    if k.endpoints and l.endpoints:
        endpoints = (tensor_id(k.endpoints[0], l.endpoints[0]), tensor_id(k.endpoints[1], l.endpoints[1]))
    name = f"{k.name}⊗{l.name}" if k.name and l.name else ""
    return Adc(basis, differential, augmentation, endpoints, name)


def tensor_chain(x: Chain, y: Chain) -> Chain:
    terms: Dict[str, int] = defaultdict(int)
    for a, ca in x.items():
        for b, cb in y.items():
            terms[tensor_id(a, b)] += ca * cb
    return Chain(x.degree + y.degree, terms)


def dualize(adc: Adc, degrees: Iterable[int]) -> Adc:
    """Negate the differential on the basis elements whose degree lies in `degrees`."""
    flipped = set(degrees)
    differential = {}
    for b in adc.ids():
        if adc.degree(b) > 0:
            chain = adc.boundary(b)
            differential[b] = -chain if adc.degree(b) in flipped else chain
    endpoints = adc.endpoints
    if endpoints is not None and 1 in flipped:
        endpoints = (endpoints[1], endpoints[0])
    return Adc(adc.elements(), differential, {b: adc.augmentation(b) for b in adc.basis(0)},
               endpoints, adc.name)


def duality_degrees(kind: str, top: int) -> Tuple[int, ...]:
    """Degrees reversed by a duality: op = odd, co = even, full = all positive."""
    if kind == "op":
        return tuple(range(1, top + 1, 2))
    if kind == "co":
        return tuple(range(2, top + 1, 2))
    if kind == "full":
        return tuple(range(1, top + 1))
    raise ValueError(f"unknown duality {kind!r}; expected op, co or full")


# -- chain maps ------------------------------------------------------------

class ChainMap:
    """A degree-preserving linear map between complexes, given on the basis.

    Args:
        source: Source complex
        target: Target complex
        action: Map from source ids to target chains (a bare id means that element);
            missing entries map to 0
        name: Display name
    """

    def __init__(self, source: Adc, target: Adc,
                 action: Mapping[str, Union[Chain, str, Mapping[str, int]]], name: str = ""):
        self.source = source
        self.target = target
        self.name = name
        unknown = set(action) - set(source.ids())
        if unknown:
            raise InvalidComplexError(f"map defined on elements outside its source: {sorted(unknown)}")
        self._action: Dict[str, Chain] = {}
        for b in source.ids():
            degree = source.degree(b)
            value = action.get(b)
            if value is None:
                chain = Chain(degree)
            elif isinstance(value, Chain):
                chain = value
            elif isinstance(value, str):
                chain = Chain.unit(value, degree)
            else:
                chain = Chain(degree, value)
            if chain.is_zero:
                chain = Chain(degree)
            elif chain.degree != degree:
                raise InvalidComplexError(f"{b!r} of degree {degree} sent to a chain of degree {chain.degree}")
            for t in chain.support():
                if t not in target or target.degree(t) != degree:
                    raise InvalidComplexError(f"{b!r} sent to {t!r}, not a degree-{degree} element of the target")
            self._action[b] = chain

    @classmethod
    def identity(cls, adc: Adc) -> "ChainMap":
        return cls(adc, adc, {b: b for b in adc.ids()}, name="id")

    def image(self, element: str) -> Chain:
        return self._action[element]

    def apply(self, chain: Chain) -> Chain:
        total = Chain(chain.degree)
        for element, coeff in chain.items():
            total = total + self._action[element] * coeff
        return total

    def then(self, other: "ChainMap") -> "ChainMap":
        """The composite: this map followed by `other`."""
        if self.target != other.source:
            raise NotComposableError(f"cannot compose {self.name or 'map'} with {other.name or 'map'}: target and source differ")
        return ChainMap(self.source, other.target,
                        {b: other.apply(chain) for b, chain in self._action.items()},
                        name=f"{other.name}∘{self.name}" if self.name and other.name else "")

    def violations(self) -> Report:
        """Commutation with ∂, preservation of ε and of the positive cone."""
        report = Report(f"chain map {self.name}".strip())
        for b in self.source.ids():
            image = self._action[b]
            if self.source.degree(b) > 0:
                left = self.target.differential(image)
                right = self.apply(self.source.boundary(b))
                if left != right:
                    report.add(b, "commutes-with-boundary", f"∂f({b}) = {left} but f(∂{b}) = {right}")
            elif self.target.augment(image) != self.source.augmentation(b):
                report.add(b, "augmentation", f"ε f({b}) = {self.target.augment(image)}")
            if not image.is_non_negative():
                report.add(b, "positivity", f"f({b}) = {image}")
        return report

    def is_valid(self) -> bool:
        return self.violations().ok

    def is_basis_inclusion(self) -> bool:
        images = [chain.single() for chain in self._action.values()]
        return all(images) and len(set(images)) == len(images)

    def is_isomorphism(self) -> bool:
        return self.is_basis_inclusion() and len(self.source) == len(self.target) and self.is_valid()

    def inverse(self) -> "ChainMap":
        if not self.is_isomorphism():
            raise InvalidComplexError("only basis bijections that are chain maps can be inverted")
        return ChainMap(self.target, self.source, {chain.single(): b for b, chain in self._action.items()},
                        name=f"{self.name}⁻¹" if self.name else "")

    def is_identity(self) -> bool:
        return self.source == self.target and all(
            chain.single() == b for b, chain in self._action.items())

    def __eq__(self, other) -> bool:
        if not isinstance(other, ChainMap):
            return NotImplemented
        return self.source == other.source and self.target == other.target and self._action == other._action

    def __hash__(self) -> int:
        return hash(tuple(self._action))

    def __repr__(self) -> str:
        return f"<ChainMap {self.name or ''} {self.source!r} → {self.target!r}>"

    def to_dict(self) -> Dict:
        return {b: chain.to_json() for b, chain in self._action.items()}


def tensor_maps(f: ChainMap, g: ChainMap) -> ChainMap:
    """f ⊗ g between the tensor products of sources and targets."""
    source = tensor(f.source, g.source)
    target = tensor(f.target, g.target)
    action = {tensor_id(b, c): tensor_chain(f.image(b), g.image(c))
              for b in f.source.ids() for c in g.source.ids()}
    return ChainMap(source, target, action, name="⊗")


def associator(k: Adc, l: Adc, m: Adc) -> ChainMap:
    """Re-bracketing (K⊗L)⊗M → K⊗(L⊗M) on the basis."""
    source = tensor(tensor(k, l), m)
    target = tensor(k, tensor(l, m))
    action = {tensor_id(tensor_id(a, b), c): tensor_id(a, tensor_id(b, c))
              for a in k.ids() for b in l.ids() for c in m.ids()}
    return ChainMap(source, target, action, name="assoc")


# -- Steiner conditions ----------------------------------------------------

def atom(adc: Adc, element: str) -> Tuple[Tuple[Chain, Chain], ...]:
    """The atom table ⟨b⟩: ⟨b⟩_k^- = ∂⁻⟨b⟩_{k+1}^-, ⟨b⟩_k^+ = ∂⁺⟨b⟩_{k+1}^+."""
    n = adc.degree(element)
    top = adc.unit(element)
    rows = [(top, top)]
    minus = plus = top
    for _ in range(n):
        minus = adc.minus(minus)
        plus = adc.plus(plus)
        rows.append((minus, plus))
    return tuple(reversed(rows))


def table_problems(adc: Adc, table: Sequence[Tuple[Chain, Chain]]) -> List[str]:
    """Reasons a table fails to be a cell of nu(adc); empty when it is one."""
    problems = []
    top = len(table) - 1
    if table[top][0] != table[top][1]:
        problems.append("top entries differ")
    for i, (minus, plus) in enumerate(table):
        if not (minus.is_non_negative() and plus.is_non_negative()):
            problems.append(f"negative coefficient at {i}")
        if i == 0:
            for chain in (minus, plus):
                if adc.augment(chain) != 1:
                    problems.append(f"augmentation of {chain} is {adc.augment(chain)}")
            continue
        expected = table[i - 1][1] - table[i - 1][0]
        for chain in (minus, plus):
            if adc.differential(chain) != expected:
                problems.append(f"∂({chain}) ≠ {expected}")
    return problems


@dataclass(frozen=True)
class BasisConditions:
    """Steiner's conditions on a basis, with the failing elements."""
    unital: bool
    atomic: bool
    loop_free: bool
    steiner_loop_free: bool
    failures: Tuple[str, ...] = field(default=())

    def all(self) -> bool:
        return self.unital and self.atomic and self.loop_free

    def to_dict(self) -> Dict:
        return {
            "unital": self.unital,
            "atomic": self.atomic,
            "loop_free": self.loop_free,
            "steiner_loop_free": self.steiner_loop_free,
            "failures": list(self.failures),
        }


def precedence_graph(adc: Adc) -> nx.DiGraph:
    """a → b when a ∈ supp ∂⁻b or b ∈ supp ∂⁺a."""
    graph = nx.DiGraph()
    graph.add_nodes_from(adc.ids())
    for b in adc.ids():
        if adc.degree(b) == 0:
            continue
        boundary = adc.boundary(b)
        for a in boundary.negative_part().support():
            graph.add_edge(a, b)
        for c in boundary.positive_part().support():
            graph.add_edge(b, c)
    return graph


def steiner_relations(adc: Adc) -> Dict[int, nx.DiGraph]:
    """For each k, a <_k b when ⟨a⟩_k^+ and ⟨b⟩_k^- share support (|a|, |b| > k)."""
    atoms = {b: atom(adc, b) for b in adc.ids()}
    relations = {}
    for k in range(adc.top_degree):
        graph = nx.DiGraph()
        members = [b for b in adc.ids() if adc.degree(b) > k]
        graph.add_nodes_from(members)
        sources = defaultdict(set)
        for b in members:
            for x in atoms[b][k][0].support():
                sources[x].add(b)
        for a in members:
            for x in atoms[a][k][1].support():
                for b in sorted(sources.get(x, ())):
                    graph.add_edge(a, b)
        relations[k] = graph
    return relations


def check_basis_conditions(adc: Adc) -> BasisConditions:
    """Unitality, atomicity and loop-freeness of the basis.

    Raises:
        InvalidComplexError: If the complex fails validate
    """
    _require_valid(adc)
    failures = []
    unital = atomic = True
    for b in adc.ids():
        table = atom(adc, b)
        if any(adc.augment(chain) != 1 for chain in table[0]):
            unital = False
            failures.append(f"{b}: not unital")
        for i in range(1, len(table)):
            expected = table[i - 1][1] - table[i - 1][0]
            if any(adc.differential(chain) != expected for chain in table[i]):
                atomic = False
                failures.append(f"{b}: atom table breaks at degree {i}")
                break

    graph = precedence_graph(adc)
    loop_free = nx.is_directed_acyclic_graph(graph)
    if not loop_free:
        cycle = nx.find_cycle(graph)
        failures.append("precedence cycle: " + " → ".join(edge[0] for edge in cycle))
    steiner = all(nx.is_directed_acyclic_graph(g) for g in steiner_relations(adc).values())
    logger.debug("basis conditions for %s: unital=%s atomic=%s loop_free=%s steiner=%s",
                 adc.name, unital, atomic, loop_free, steiner)
    return BasisConditions(unital, atomic, loop_free, steiner, tuple(failures))


# -- nu cells ---------------------------------------------------------------

@dataclass(frozen=True)
class NuCell:
    """A cell of nu(K): a table of chains (x_i^-, x_i^+) for i ≤ dimension.

    Entries above the dimension are zero; a cell is degenerate (an identity)
    when its top chain is zero.
    """
    dimension: int
    table: Tuple[Tuple[Chain, Chain], ...]

    def minus(self, i: int) -> Chain:
        return self.table[i][0] if i <= self.dimension else Chain(i)

    def plus(self, i: int) -> Chain:
        return self.table[i][1] if i <= self.dimension else Chain(i)

    @property
    def top(self) -> Chain:
        return self.table[-1][0]

    @property
    def is_degenerate(self) -> bool:
        return self.dimension > 0 and self.top.is_zero

    def source(self) -> "NuCell":
        d = self.dimension - 1
        return NuCell(d, self.table[:d] + ((self.minus(d), self.minus(d)),))

    def target(self) -> "NuCell":
        d = self.dimension - 1
        return NuCell(d, self.table[:d] + ((self.plus(d), self.plus(d)),))

    def identity(self) -> "NuCell":
        d = self.dimension
        return NuCell(d + 1, self.table + ((Chain(d + 1), Chain(d + 1)),))

    def sort_key(self) -> Tuple:
        return (self.dimension, tuple((m.sort_key(), p.sort_key()) for m, p in self.table))

    def __str__(self) -> str:
        if self.dimension == 0:
            return f"⟨{self.top}⟩"
        rows = "; ".join(f"{m} → {p}" for m, p in self.table[:-1])
        return f"⟨{rows}; {self.top}⟩"


def _bounded_chains(adc: Adc, degree: int, cap: int, budget: config.SearchBudget) -> Iterator[Chain]:
    basis = adc.basis(degree)
    for coefficients in itertools.product(range(cap + 1), repeat=len(basis)):
        budget.tick()
        yield Chain(degree, dict(zip(basis, coefficients)))


def nu_cells(adc: Adc, max_dim: int, coeff_cap: Optional[int] = None,
             budget: Optional[int] = None) -> List[NuCell]:
    """Enumerate the cells of nu(adc) up to max_dim with coefficients ≤ coeff_cap.

    Degenerate cells are included. Dimension d is built from parallel pairs
    (y, z) of (d-1)-cells and non-negative chains x with ∂x = z_top - y_top.

    Args:
        adc: Complex whose basis passes check_basis_conditions
        max_dim: Largest cell dimension
        coeff_cap: Coefficient bound; defaults to config.get_cap()
        budget: Node budget; defaults to config.get_budget()

    Returns:
        Cells in canonical order

    Raises:
        InvalidComplexError: If the basis conditions fail
        BudgetExceededError: If the search exceeds its budget
    """
    cap = config.get_cap() if coeff_cap is None else coeff_cap
    if cap < 1:
        raise ValueError("coefficient cap must be at least 1")
    conditions = check_basis_conditions(adc)
    if not conditions.all():
        raise InvalidComplexError(f"nu needs a unital atomic loop-free basis: {'; '.join(conditions.failures)}")
    counter = config.SearchBudget("nu cell enumeration", budget)

    level = [NuCell(0, ((x, x),)) for x in _bounded_chains(adc, 0, cap, counter) if adc.augment(x) == 1]
    cells = list(level)
    for d in range(1, max_dim + 1):
        by_boundary: Dict[Chain, List[Chain]] = defaultdict(list)
        for x in _bounded_chains(adc, d, cap, counter):
            by_boundary[adc.differential(x)].append(x)
        parallel: Dict[Tuple, List[NuCell]] = defaultdict(list)
        for cell in level:
            parallel[cell.table[:-1]].append(cell)
        next_level = []
        for members in parallel.values():
            for y, z in itertools.product(members, repeat=2):
                counter.tick()
                for x in by_boundary.get(z.top - y.top, ()):
                    next_level.append(NuCell(d, y.table[:-1] + ((y.top, z.top), (x, x))))
        next_level.sort(key=NuCell.sort_key)
        cells.extend(next_level)
        level = next_level
    logger.info("nu(%s): %d cells up to dimension %d (%d search nodes)",
                adc.name, len(cells), max_dim, counter.nodes)
    return cells


def nondegenerate_counts(cells: Iterable[NuCell]) -> Tuple[int, ...]:
    counts = Counter(c.dimension for c in cells if not c.is_degenerate)
    top = max(counts, default=-1)
    return tuple(counts.get(d, 0) for d in range(top + 1))


def nu_compose(x: NuCell, y: NuCell, i: int) -> NuCell:
    """The i-composite of x followed by y.

    Raises:
        NotComposableError: If the i-target of x is not the i-source of y
    """
    dim = max(x.dimension, y.dimension)
    if not 0 <= i < dim:
        raise NotComposableError(f"cannot compose cells of dimensions {x.dimension}, {y.dimension} along {i}")
    for j in range(i):
        if x.minus(j) != y.minus(j) or x.plus(j) != y.plus(j):
            raise NotComposableError(f"cells differ below dimension {i}")
    if x.plus(i) != y.minus(i):
        raise NotComposableError(f"{i}-target {x.plus(i)} differs from {i}-source {y.minus(i)}")
    table = []
    for j in range(dim + 1):
        if j < i:
            table.append((x.minus(j), x.plus(j)))
        elif j == i:
            table.append((x.minus(i), y.plus(i)))
        else:
            table.append((x.minus(j) + y.minus(j), x.plus(j) + y.plus(j)))
    return NuCell(dim, tuple(table))


# -- pushouts ----------------------------------------------------------------

@dataclass
class PushoutResult:
    """Apex of a pushout B ← A → C with its legs B → P and C → P."""
    apex: Adc
    left: ChainMap
    right: ChainMap
    span: Tuple[ChainMap, ChainMap]

    def mediate(self, to_left: ChainMap, to_right: ChainMap) -> ChainMap:
        """The unique map P → T through which the cocone (to_left, to_right) factors.

        Raises:
            PushoutError: If the cocone does not commute on the span
        """
        f, g = self.span
        if to_left.source != f.target or to_right.source != g.target or to_left.target != to_right.target:
            raise PushoutError("cocone legs do not match the span")
        for a in f.source.ids():
            if to_left.apply(f.image(a)) != to_right.apply(g.image(a)):
                raise PushoutError(f"cocone does not commute on {a!r}")
        action = {}
        for leg, cocone in ((self.left, to_left), (self.right, to_right)):
            for b in leg.source.ids():
                image = leg.image(b).single()
                if image is not None and image not in action:
                    action[image] = cocone.image(b)
        return ChainMap(self.apex, to_left.target, action, name="mediator")


def pushout_adc(f: ChainMap, g: ChainMap) -> PushoutResult:
    """Pushout of B ← A → C where one leg is a basis inclusion.

    The apex keeps the ids of the other leg's target and adds the elements of the
    including target outside the image (renamed with a prime on collision).

    Raises:
        PushoutError: If neither leg is a basis inclusion or the legs are not chain maps
    """
    if f.source != g.source:
        raise PushoutError("span legs have different sources")
    for leg in (f, g):
        report = leg.violations()
        bad = [v for v in report.violations if v.rule != "positivity"]
        if bad:
            raise PushoutError(f"span leg is not a chain map: {bad[0].detail}")
    if f.is_basis_inclusion():
        apex, attach, keep = _attach(f, g)
        return PushoutResult(apex, attach, keep, (f, g))
    if g.is_basis_inclusion():
        apex, attach, keep = _attach(g, f)
        return PushoutResult(apex, keep, attach, (f, g))
    raise PushoutError("pushouts need one leg to be a basis inclusion")


def _attach(inclusion: ChainMap, other: ChainMap) -> Tuple[Adc, ChainMap, ChainMap]:
    source, base = inclusion.target, other.target
    preimage = {inclusion.image(a).single(): a for a in inclusion.source.ids()}
    taken = set(base.ids())
    rename = {}
    for b in source.ids():
        if b in preimage:
            continue
        new = b
        while new in taken:
            new += "'"
        taken.add(new)
        rename[b] = new

    def quotient(b: str) -> Chain:
        if b in preimage:
            return other.image(preimage[b])
        return Chain.unit(rename[b], source.degree(b))

    basis = base.elements() + [(rename[b], source.degree(b)) for b in source.ids() if b in rename]
    differential = {c: base.boundary(c) for c in base.ids() if base.degree(c) > 0}
    augmentation = {c: base.augmentation(c) for c in base.basis(0)}
    for b, new in rename.items():
        if source.degree(b) > 0:
            differential[new] = sum_chains(source.degree(b) - 1,
                                           (quotient(x) * c for x, c in source.boundary(b).items()))
        else:
            augmentation[new] = source.augmentation(b)
    apex = Adc(basis, differential, augmentation, name="pushout")
    attach = ChainMap(source, apex, {b: quotient(b) for b in source.ids()}, name="leg")
    keep = ChainMap(base, apex, {c: c for c in base.ids()}, name="leg")
    logger.debug("pushout: kept %d elements, attached %d", len(base), len(rename))
    return apex, attach, keep


# -- isomorphism search -----------------------------------------------------

def _neighbours(adc: Adc) -> Tuple[Dict[str, Dict[str, int]], Dict[str, Dict[str, int]]]:
    down = {b: dict(adc.boundary(b).items()) if adc.degree(b) > 0 else {} for b in adc.ids()}
    up: Dict[str, Dict[str, int]] = {b: {} for b in adc.ids()}
    for b, terms in down.items():
        for x, c in terms.items():
            up[x][b] = c
    return down, up


def _refine_colours(complexes: Sequence[Adc]) -> List[Dict[str, int]]:
    neighbours = [_neighbours(adc) for adc in complexes]
    signatures = []
    for adc, (down, up) in zip(complexes, neighbours):
        signatures.append({
            b: (adc.degree(b), adc.augmentation(b), tuple(sorted(down[b].values())), tuple(sorted(up[b].values())))
            for b in adc.ids()
        })
    colours = _compress(signatures)
    classes = len({c for colour in colours for c in colour.values()})
    for _ in range(sum(len(adc) for adc in complexes)):
        signatures = []
        for colour, (down, up) in zip(colours, neighbours):
            signatures.append({
                b: (colour[b],
                    tuple(sorted((colour[x], c) for x, c in down[b].items())),
                    tuple(sorted((colour[x], c) for x, c in up[b].items())))
                for b in colour
            })
        colours = _compress(signatures)
        refined = len({c for colour in colours for c in colour.values()})
        if refined == classes:
            break
        classes = refined
    return colours


def _compress(signatures: List[Dict[str, Tuple]]) -> List[Dict[str, int]]:
    palette = {sig: n for n, sig in enumerate(sorted({s for sigs in signatures for s in sigs.values()}))}
    return [{b: palette[s] for b, s in sigs.items()} for sigs in signatures]


def find_isomorphism(k: Adc, l: Adc, budget: Optional[int] = None) -> Optional[ChainMap]:
    """Search for a basis bijection k → l that is a chain map.

    Returns:
        The isomorphism, or None when the complexes are not isomorphic

    Raises:
        BudgetExceededError: If the backtracking search exceeds its budget
    """
    if k.size_by_degree() != l.size_by_degree():
        return None
    colours_k, colours_l = _refine_colours([k, l])
    if Counter(colours_k.values()) != Counter(colours_l.values()):
        return None
    candidates: Dict[int, List[str]] = defaultdict(list)
    for y in l.ids():
        candidates[colours_l[y]].append(y)
    down_k, up_k = _neighbours(k)
    down_l, up_l = _neighbours(l)

    class_size = Counter(colours_k.values())
    order: List[str] = []
    placed = set()
    remaining = sorted(k.ids(), key=lambda b: (class_size[colours_k[b]], -k.degree(b), b))
    while remaining:
        frontier = [b for b in remaining if any(n in placed for n in itertools.chain(down_k[b], up_k[b]))]
        nxt = frontier[0] if frontier else remaining[0]
        order.append(nxt)
        placed.add(nxt)
        remaining.remove(nxt)

    mapping: Dict[str, str] = {}
    used: Dict[str, str] = {}
    counter = config.SearchBudget("isomorphism search", budget)

    def consistent(x: str, y: str) -> bool:
        for mine, theirs in ((down_k, down_l), (up_k, up_l)):
            mapped = 0
            for z, c in mine[x].items():
                if z in mapping:
                    mapped += 1
                    if theirs[y].get(mapping[z], 0) != c:
                        return False
            if mapped != sum(1 for w in theirs[y] if w in used):
                return False
        return True

    def extend(position: int) -> bool:
        if position == len(order):
            return True
        x = order[position]
        for y in candidates[colours_k[x]]:
            if y in used:
                continue
            counter.tick()
            if not consistent(x, y):
                continue
            mapping[x] = y
            used[y] = x
            if extend(position + 1):
                return True
            del mapping[x]
            del used[y]
        return False

    if not extend(0):
        return None
    iso = ChainMap(k, l, dict(mapping), name="iso")
    logger.debug("isomorphism found after %d nodes", counter.nodes)
    return iso if iso.is_isomorphism() else None
