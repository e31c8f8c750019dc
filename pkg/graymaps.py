"""
Explicit comparison maps between suspensions and Gray tensor products.

Each construction returns ChainMaps built clause by clause, and each verifier
assembles a colimit with pushout_adc and checks that the induced comparison
map is an isomorphism of complexes.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import config
from adc import (
    Adc, Chain, ChainMap, PushoutResult, discrete_adc, dualize, duality_degrees, edge_id,
    find_isomorphism, path_adc, pushout_adc, suspend_adc, suspension_id, suspension_sum,
    tensor, tensor_id, vertex_adc, vertex_id,
)
from errors import ClauseError, DimensionBoundError
from reports import Report
from theta import GlobularSum, dimension, to_adc

logger = logging.getLogger(__name__)


@dataclass
class DecompositionWitness:
    """A colimit together with its comparison map into the expected complex.

    Args:
        colimit: Apex of the iterated pushout
        comparison: Induced map from the colimit to the expected complex
        inverse: Inverse of the comparison, or None when it is not invertible
        legs: Cone legs into the expected complex
        objects: Named objects of the diagram
        arrows: (source, target, label) arrows of the diagram
        report: Checks performed on the way
    """
    colimit: Adc
    comparison: ChainMap
    inverse: Optional[ChainMap]
    legs: List[ChainMap] = field(default_factory=list)
    objects: Dict[str, Adc] = field(default_factory=dict)
    arrows: List[Tuple[str, str, str]] = field(default_factory=list)
    report: Report = field(default_factory=lambda: Report("decomposition"))

    @property
    def ok(self) -> bool:
        return self.inverse is not None and self.report.ok

    def to_dict(self) -> Dict:
        return {
            "ok": self.ok,
            "colimit": self.colimit.to_dict(),
            "comparison": self.comparison.to_dict(),
            "objects": {name: list(adc.size_by_degree()) for name, adc in self.objects.items()},
            "arrows": [list(arrow) for arrow in self.arrows],
            "report": self.report.to_dict(),
        }


def reindex(n: int, m: int, k: int, l: int) -> int:
    """Send the k-th block of [n × m] onto [n]: clamp l - nk to [0, n]."""
    if l <= n * k:
        return 0
    if l <= n * (k + 1):
        return l - n * k
    return n


def _check_unital(c: Adc) -> None:
    for b in c.basis(0):
        if c.augmentation(b) != 1:
            raise ClauseError(f"degree-0 element {b!r} has augmentation {c.augmentation(b)}; the formulas need 1")


def p_s_nm(c: Adc, n: int, m: int) -> Tuple[ChainMap, ChainMap]:
    """The map p: [C, m] ⊗ [n×m] → [C ⊗ [n], m] and its section s.

    Args:
        c: Complex whose degree-0 elements all have augmentation 1
        n: Length of each path block
        m: Number of suspended blocks

    Returns:
        (p, s) with p ∘ s the identity

    Raises:
        ClauseError: If a degree-0 element of c has augmentation other than 1
    """
    if m < 1 or n < 0:
        raise ValueError("p and s need m ≥ 1 and n ≥ 0")
    _check_unital(c)
    tag = (lambda k: k) if m > 1 else (lambda k: None)
    source = tensor(suspension_sum([c] * m), path_adc(n * m))
    target = suspension_sum([tensor(c, path_adc(n))] * m)

    def block(x: str, k: int) -> str:
        return suspension_id(x, tag(k))

    p: Dict[str, Chain] = {}
    for j in range(m + 1):
        for l in range(n * m + 1):
            p[tensor_id(vertex_id(j), vertex_id(l))] = Chain.unit(vertex_id(j), 0)
    for k in range(m):
        for b in c.ids():
            degree = c.degree(b) + 1
            for l in range(n * m + 1):
                q = n - reindex(n, m, k, l)
                p[tensor_id(block(b, k), vertex_id(l))] = Chain.unit(block(tensor_id(b, vertex_id(q)), k), degree)
            for l in range(n * k, n * (k + 1)):
                i = n - (l - n * k) - 1
                p[tensor_id(block(b, k), edge_id(l))] = Chain.unit(block(tensor_id(b, edge_id(i)), k), degree + 1)

    s: Dict[str, Chain] = {vertex_id(j): Chain.unit(tensor_id(vertex_id(j), vertex_id(n * j)), 0) for j in range(m + 1)}
    for k in range(m):
        for b in c.ids():
            degree = c.degree(b) + 1
            for i in range(n):
                s[block(tensor_id(b, edge_id(i)), k)] = Chain.unit(
                    tensor_id(block(b, k), edge_id(n * k + n - i - 1)), degree + 1)
            for q in range(n + 1):
                middle = tensor_id(block(b, k), vertex_id(n * k + n - q))
                if c.degree(b) > 0:
                    s[block(tensor_id(b, vertex_id(q)), k)] = Chain.unit(middle, degree)
                    continue
                terms = {middle: 1}
                for l in range(n * k, n * k + n - q):
                    terms[tensor_id(vertex_id(k), edge_id(l))] = 1
                for l in range(n * k + n - q, n * (k + 1)):
                    terms[tensor_id(vertex_id(k + 1), edge_id(l))] = 1
                s[block(tensor_id(b, vertex_id(q)), k)] = Chain(1, terms)

    logger.debug("p/s for n=%d m=%d: %d source and %d target elements", n, m, len(source), len(target))
    return ChainMap(source, target, p, name=f"p^{n},{m}"), ChainMap(target, source, s, name=f"s^{n},{m}")


def p_map(a: Adc, n: int) -> ChainMap:
    """p: [A, 1] ⊗ [n] → [A ⊗ [n], 1]."""
    return p_s_nm(a, n, 1)[0]


def s_map(a: Adc, n: int) -> ChainMap:
    """s: [A ⊗ [n], 1] → [A, 1] ⊗ [n], a section of p_map."""
    return p_s_nm(a, n, 1)[1]


def section_report(p: ChainMap, s: ChainMap) -> Report:
    """Check that p and s are chain maps, p ∘ s = id and s ∘ p is idempotent."""
    report = Report(f"section {s.name}".strip())
    report.merge(p.violations(), prefix="p:")
    report.merge(s.violations(), prefix="s:")
    if report.ok:
        round_trip = s.then(p)
        for b in s.source.ids():
            if round_trip.image(b) != Chain.unit(b, s.source.degree(b)):
                report.add(b, "section", f"p(s({b})) = {round_trip.image(b)}")
        projection = p.then(s)
        if projection.then(projection) != projection:
            report.add(p.source.name or "source", "idempotent", "s∘p∘s∘p differs from s∘p")
    report.facts["checked"] = len(s.source)
    return report


def _nabla_terms(x: str, y: str, k: Adc, l: Adc, x_block: int, y_block: int) -> Dict[str, int]:
    terms = {}
    if l.degree(y) == 0:
        terms[suspension_id(x, x_block)] = 1
    if k.degree(x) == 0:
        terms[suspension_id(y, y_block)] = 1
    return terms


def nabla(k: Adc, l: Adc, side: str = "left", through: Optional[str] = None) -> ChainMap:
    """∇: [K ⊗ L, 1] → [K, 1] ∨ [L, 1] (left) or [L, 1] ∨ [K, 1] (right).

    With `through` set to a vertex name the source is [K ⊗ {v} ⊗ L, 1].
    [x⊗y, 1] goes to [x, 1] when |y| = 0 and to [y, 1] when |x| = 0; both
    terms appear when both are points, nothing otherwise.
    """
    if side not in ("left", "right"):
        raise ValueError(f"side must be left or right, got {side!r}")
    inner = tensor(k, l) if through is None else tensor(tensor(k, vertex_adc(through)), l)
    source = suspend_adc(inner)
    target = suspension_sum([k, l] if side == "left" else [l, k])
    x_block, y_block = (0, 1) if side == "left" else (1, 0)
    action = {vertex_id(0): vertex_id(0), vertex_id(1): vertex_id(2)}
    for x in k.ids():
        for y in l.ids():
            element = tensor_id(x, y) if through is None else tensor_id(tensor_id(x, through), y)
            action[suspension_id(element)] = Chain(k.degree(x) + l.degree(y) + 1,
                                                   _nabla_terms(x, y, k, l, x_block, y_block))
    return ChainMap(source, target, action, name=f"∇{side[0]}")


def decomposition_cone(k: Adc, l: Adc) -> ChainMap:
    """f: [K ⊗ [1] ⊗ L, 1] → [K, 1] ⊗ [L, 1]."""
    source = suspend_adc(tensor(tensor(k, path_adc(1)), l))
    target = tensor(suspend_adc(k), suspend_adc(l))
    v0, v1, e0 = vertex_id(0), vertex_id(1), edge_id(0)
    action: Dict[str, Chain] = {
        v0: Chain.unit(tensor_id(v0, v0), 0),
        v1: Chain.unit(tensor_id(v1, v1), 0),
    }
    for x in k.ids():
        sx = suspension_id(x)
        for y in l.ids():
            sy = suspension_id(y)
            degree = k.degree(x) + l.degree(y)
            action[suspension_id(tensor_id(tensor_id(x, e0), y))] = Chain.unit(tensor_id(sx, sy), degree + 2)
            for vertex, x_side, y_side in ((v0, v1, v0), (v1, v0, v1)):
                terms = {}
                if l.degree(y) == 0:
                    terms[tensor_id(sx, x_side)] = 1
                if k.degree(x) == 0:
                    terms[tensor_id(y_side, sy)] = 1
                action[suspension_id(tensor_id(tensor_id(x, vertex), y))] = Chain(degree + 1, terms)
    return ChainMap(source, target, action, name="f")


def _wedge_leg(k: Adc, l: Adc, side: str) -> ChainMap:
    """The cone leg from [K,1]∨[L,1] (left) or [L,1]∨[K,1] (right) into [K,1]⊗[L,1]."""
    wedge = suspension_sum([k, l] if side == "left" else [l, k])
    target = tensor(suspend_adc(k), suspend_adc(l))
    v0, v1 = vertex_id(0), vertex_id(1)
    if side == "left":
        corners = [(v0, v0), (v1, v0), (v1, v1)]
        x_block, y_block, x_fixed, y_fixed = 0, 1, v0, v1
    else:
        corners = [(v0, v0), (v0, v1), (v1, v1)]
        x_block, y_block, x_fixed, y_fixed = 1, 0, v1, v0
    action = {vertex_id(i): tensor_id(a, b) for i, (a, b) in enumerate(corners)}
    for x in k.ids():
        action[suspension_id(x, x_block)] = tensor_id(suspension_id(x), x_fixed)
    for y in l.ids():
        action[suspension_id(y, y_block)] = tensor_id(y_fixed, suspension_id(y))
    return ChainMap(wedge, target, action, name=f"leg {side}")


def _inclusion(source: Adc, target: Adc, name: str) -> ChainMap:
    return ChainMap(source, target, {b: b for b in source.ids()}, name=name)


def _witness(colimit: PushoutResult, comparison: ChainMap, expected: Adc, report: Report) -> Tuple[Optional[ChainMap], Report]:
    report.merge(comparison.violations(), prefix="comparison:")
    report.facts["colimit_sizes"] = list(colimit.apex.size_by_degree())
    report.facts["expected_sizes"] = list(expected.size_by_degree())
    if comparison.is_isomorphism():
        return comparison.inverse(), report
    report.add(comparison.name or "comparison", "isomorphism", "the induced comparison is not a basis bijection")
    report.facts["abstractly_isomorphic"] = find_isomorphism(colimit.apex, expected) is not None
    return None, report


def verify_susp_tensor_decomposition(c: GlobularSum, d: GlobularSum,
                                     bound: Optional[int] = None) -> DecompositionWitness:
    """Exhibit [C,1] ⊗ [D,1] as the colimit of
    [C,1]∨[D,1] ← [C⊗{1}⊗D,1] → [C⊗[1]⊗D,1] ← [C⊗{0}⊗D,1] → [D,1]∨[C,1].

    Raises:
        DimensionBoundError: If dim C + dim D + 2 exceeds the bound
    """
    bound = config.get_decomposition_bound() if bound is None else bound
    total = dimension(c) + dimension(d) + 2
    if total > bound:
        raise DimensionBoundError(f"[C,1]⊗[D,1] has dimension {total}, above the bound {bound}")
    k, l = to_adc(c), to_adc(d)
    middle = decomposition_cone(k, l)
    nabla1 = nabla(k, l, "left", through=vertex_id(1))
    nabla0 = nabla(k, l, "right", through=vertex_id(0))
    include1 = _inclusion(nabla1.source, middle.source, "i1")
    include0 = _inclusion(nabla0.source, middle.source, "i0")
    leg1, leg0 = _wedge_leg(k, l, "left"), _wedge_leg(k, l, "right")

    first = pushout_adc(include1, nabla1)
    second = pushout_adc(include0.then(first.left), nabla0)
    comparison = second.mediate(first.mediate(middle, leg1), leg0)
    comparison.name = "comparison"

    report = Report(f"decomposition of [{c},1]⊗[{d},1]")
    for cone_map in (middle, nabla1, nabla0, leg1, leg0):
        report.merge(cone_map.violations(), prefix=f"{cone_map.name}:")
    inverse, report = _witness(second, comparison, middle.target, report)
    logger.info("decomposition %s ⊗ %s: colimit %s, ok=%s", c, d, second.apex.size_by_degree(), inverse is not None)
    return DecompositionWitness(
        colimit=second.apex,
        comparison=comparison,
        inverse=inverse,
        legs=[middle, leg1, leg0],
        objects={
            "[C,1]∨[D,1]": nabla1.target,
            "[C⊗{1}⊗D,1]": nabla1.source,
            "[C⊗[1]⊗D,1]": middle.source,
            "[C⊗{0}⊗D,1]": nabla0.source,
            "[D,1]∨[C,1]": nabla0.target,
            "[C,1]⊗[D,1]": middle.target,
        },
        arrows=[
            ("[C⊗{1}⊗D,1]", "[C,1]∨[D,1]", "∇"),
            ("[C⊗{1}⊗D,1]", "[C⊗[1]⊗D,1]", "i1"),
            ("[C⊗{0}⊗D,1]", "[C⊗[1]⊗D,1]", "i0"),
            ("[C⊗{0}⊗D,1]", "[D,1]∨[C,1]", "∇"),
            ("[C,1]∨[D,1]", "[C,1]⊗[D,1]", "leg"),
            ("[C⊗[1]⊗D,1]", "[C,1]⊗[D,1]", "f"),
            ("[D,1]∨[C,1]", "[C,1]⊗[D,1]", "leg"),
        ],
        report=report,
    )


def _collapse_span(block: Adc, n: int, block_first: bool) -> Tuple[ChainMap, ChainMap, Adc]:
    """The span ⊔{k} ← block ⊗ ⊔{k} → block ⊗ [n] (factors swapped when block_first is False)."""
    points = discrete_adc([vertex_id(k) for k in range(n + 1)])
    if block_first:
        discrete, full = tensor(block, points), tensor(block, path_adc(n))
    else:
        discrete, full = tensor(points, block), tensor(path_adc(n), block)
    action = {}
    for x in block.ids():
        for k in range(n + 1):
            element = tensor_id(x, vertex_id(k)) if block_first else tensor_id(vertex_id(k), x)
            action[element] = vertex_id(k) if block.degree(x) == 0 else None
    collapse = ChainMap(discrete, points, {e: v for e, v in action.items() if v is not None}, name="collapse")
    return _inclusion(discrete, full, "include"), collapse, full


def _susp_witness(c: Adc, n: int, block: Adc, block_first: bool, title: str) -> DecompositionWitness:
    _check_unital(c)
    include, collapse, full = _collapse_span(block, n, block_first)
    target = suspension_sum([c] * n)
    tag = (lambda i: i) if n > 1 else (lambda i: None)
    to_full = {}
    for x in block.ids():
        for k in range(n + 1):
            element = tensor_id(x, vertex_id(k)) if block_first else tensor_id(vertex_id(k), x)
            if block.degree(x) == 0:
                to_full[element] = vertex_id(k)
        for i in range(n):
            element = tensor_id(x, edge_id(i)) if block_first else tensor_id(edge_id(i), x)
            to_full[element] = suspension_id(x, tag(i))
    leg_full = ChainMap(full, target, to_full, name="h")
    leg_points = ChainMap(collapse.target, target, {v: v for v in collapse.target.ids()}, name="h0")

    result = pushout_adc(include, collapse)
    comparison = result.mediate(leg_full, leg_points)
    comparison.name = "comparison"
    report = Report(title)
    report.merge(leg_full.violations(), prefix="h:")
    inverse, report = _witness(result, comparison, target, report)
    return DecompositionWitness(
        colimit=result.apex,
        comparison=comparison,
        inverse=inverse,
        legs=[leg_full, leg_points],
        objects={"⊔{k}": collapse.target, "span": collapse.source, "full": full, "[C,n]": target},
        arrows=[("span", "⊔{k}", "collapse"), ("span", "full", "include"),
                ("full", "[C,n]", "h"), ("⊔{k}", "[C,n]", "h0")],
        report=report,
    )


def verify_susp_colimit(c: Adc, n: int) -> DecompositionWitness:
    """[C, n] as the pushout of ⊔{k} ← C ⊗ ⊔{k} → C ⊗ [n]."""
    return _susp_witness(c, n, c, True, f"suspension colimit of {c.name or 'C'} at n={n}")


def verify_cosuspension(c: Adc, n: int) -> DecompositionWitness:
    """[C, n] as the pushout of ⊔{k} ← ⊔{k} ⊗ C° → [n] ⊗ C°, C° the full dual."""
    dual = dualize(c, duality_degrees("full", c.top_degree))
    return _susp_witness(c, n, dual, False, f"cosuspension colimit of {c.name or 'C'} at n={n}")


def _swap(source: Adc, target: Adc, k: Adc, l: Adc) -> ChainMap:
    return ChainMap(source, target, {tensor_id(b, c): tensor_id(c, b) for b in k.ids() for c in l.ids()},
                    name="swap")


def duality_tensor_check(c: GlobularSum, d: GlobularSum) -> Report:
    """(C⊗D)^op ≅ D^op⊗C^op, (C⊗D)^co ≅ D^co⊗C^co and (C⊗D)° ≅ C°⊗D°, on the basis."""
    k, l = to_adc(c), to_adc(d)
    product = tensor(k, l)
    top = product.top_degree
    report = Report(f"dualities of {c} ⊗ {d}")
    for kind in ("op", "co", "full"):
        degrees = duality_degrees(kind, top)
        dual_k, dual_l = dualize(k, degrees), dualize(l, degrees)
        source = dualize(product, degrees)
        if kind == "full":
            target = tensor(dual_k, dual_l)
            candidate = ChainMap(source, target, {b: b for b in source.ids()}, name=kind)
        else:
            target = tensor(dual_l, dual_k)
            candidate = _swap(source, target, k, l)
        if not candidate.is_isomorphism():
            detail = "; ".join(v.detail for v in candidate.violations().violations[:3])
            report.add(kind, "duality", detail or "not a basis bijection")
        report.facts[kind] = candidate.is_isomorphism()
    return report
