"""
Globular sums: the objects of Joyal's category Θ as finite planar trees.

A globular sum is either the point [0] or a node [a, n] whose n children are
themselves globular sums. Globes, paths, suspensions and wedges are built
from these two shapes.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, List, Sequence, Set, Tuple

from adc import Adc, point_adc, suspension_sum
from errors import CorpusError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GlobularSum:
    """A node with its ordered children; the point has none."""
    children: Tuple["GlobularSum", ...] = ()

    @property
    def is_point(self) -> bool:
        return not self.children

    def __len__(self) -> int:
        return len(self.children)

    def __str__(self) -> str:
        return notation(self)


POINT = GlobularSum()


def node(children: Iterable[GlobularSum]) -> GlobularSum:
    children = tuple(children)
    if not children:
        raise ValueError("a node [a, n] needs at least one child")
    return GlobularSum(children)


def suspend(a: GlobularSum) -> GlobularSum:
    """[a, 1]."""
    return GlobularSum((a,))


def globe(n: int) -> GlobularSum:
    if n < 0:
        raise ValueError("globe dimension must be non-negative")
    result = POINT
    for _ in range(n):
        result = suspend(result)
    return result


def path(n: int) -> GlobularSum:
    """[n]: n edges end to end; path(0) is the point."""
    return GlobularSum((POINT,) * n)


def wedge(a: GlobularSum, b: GlobularSum) -> GlobularSum:
    """[a, n] ∨ [b, m] = [a·b, n+m], with the point as unit."""
    return GlobularSum(a.children + b.children)


def dimension(a: GlobularSum) -> int:
    if a.is_point:
        return 0
    return 1 + max(dimension(child) for child in a.children)


def notation(a: GlobularSum) -> str:
    """Render in the [a, n] notation; sums of points print as [n]."""
    if a.is_point:
        return "[0]"
    if all(child.is_point for child in a.children):
        return f"[{len(a)}]"
    inner = ", ".join(notation(child) for child in a.children)
    return f"[{{{inner}}}, {len(a)}]"


def sum_to_json(a: GlobularSum) -> list:
    """Nested lists: the point is [], a node is the list of its children."""
    return [sum_to_json(child) for child in a.children]


def sum_from_json(data) -> GlobularSum:
    if not isinstance(data, list):
        raise CorpusError(f"a globular sum is a nested list, got {type(data).__name__}")
    return GlobularSum(tuple(sum_from_json(child) for child in data))


def to_adc(a: GlobularSum) -> Adc:
    """The complex of a globular sum: the blocks [a_k, 1] glued end to end."""
    if a.is_point:
        return point_adc().with_name(notation(a))
    return suspension_sum([to_adc(child) for child in a.children], name=notation(a))


def truncate_sum(a: GlobularSum, k: int) -> GlobularSum:
    """Collapse everything above dimension k."""
    if k < 0:
        raise ValueError("truncation degree must be non-negative")
    if k == 0 or a.is_point:
        return POINT
    return GlobularSum(tuple(truncate_sum(child, k - 1) for child in a.children))


def dual_sum(a: GlobularSum, degrees: Set[int]) -> GlobularSum:
    """Reverse the children at every depth d with d+1 in `degrees`."""
    return _dual(a, set(degrees), 0)


def _dual(a: GlobularSum, degrees: Set[int], depth: int) -> GlobularSum:
    children = [_dual(child, degrees, depth + 1) for child in a.children]
    if depth + 1 in degrees:
        children.reverse()
    return GlobularSum(tuple(children))


@dataclass(frozen=True)
class SpinePresentation:
    """A spine as globes glued in a row.

    Args:
        globes: Dimensions of the globes, left to right
        gluings: Degree of the globe shared by each consecutive pair
    """
    globes: Tuple[int, ...]
    gluings: Tuple[int, ...]

    def __post_init__(self):
        if len(self.gluings) != max(len(self.globes) - 1, 0):
            raise ValueError("a spine needs one gluing between each pair of globes")
        for k, degree in enumerate(self.gluings):
            if not degree < min(self.globes[k], self.globes[k + 1]):
                raise ValueError(f"gluing degree {degree} is not below both glued globes")

    def suspended(self) -> "SpinePresentation":
        return SpinePresentation(tuple(g + 1 for g in self.globes), tuple(j + 1 for j in self.gluings))

    def to_sum(self) -> GlobularSum:
        """The globular sum whose spine this is."""
        if self.globes == (0,):
            return POINT
        blocks: List[Tuple[List[int], List[int]]] = [([self.globes[0]], [])]
        for degree, g in zip(self.gluings, self.globes[1:]):
            if degree == 0:
                blocks.append(([g], []))
            else:
                blocks[-1][0].append(g)
                blocks[-1][1].append(degree)
        children = []
        for globes, gluings in blocks:
            lowered = SpinePresentation(tuple(g - 1 for g in globes), tuple(j - 1 for j in gluings))
            children.append(lowered.to_sum())
        return GlobularSum(tuple(children))

    def __str__(self) -> str:
        parts = [f"D{self.globes[0]}"]
        for degree, g in zip(self.gluings, self.globes[1:]):
            parts.append(f"∪_D{degree} D{g}")
        return " ".join(parts)


def spine(a: GlobularSum) -> SpinePresentation:
    """Sp_[0] = [0]; Sp_[a,n] is the row of suspended spines Sp_[a_k,1] glued over points."""
    if a.is_point:
        return SpinePresentation((0,), ())
    globes: List[int] = []
    gluings: List[int] = []
    for child in a.children:
        block = spine(child).suspended()
        if globes:
            gluings.append(0)
        globes.extend(block.globes)
        gluings.extend(block.gluings)
    return SpinePresentation(tuple(globes), tuple(gluings))


def sums_up_to(max_dim: int, max_width: int) -> List[GlobularSum]:
    """All globular sums of dimension ≤ max_dim with at most max_width children per node."""
    if max_dim == 0:
        return [POINT]
    smaller = sums_up_to(max_dim - 1, max_width)
    result = [POINT]
    for width in range(1, max_width + 1):
        result.extend(GlobularSum(children) for children in _rows(smaller, width))
    return result


def _rows(options: Sequence[GlobularSum], width: int) -> Iterable[Tuple[GlobularSum, ...]]:
    if width == 0:
        yield ()
        return
    for head in options:
        for tail in _rows(options, width - 1):
            yield (head,) + tail
