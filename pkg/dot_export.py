"""
DOT renderings of complexes, double categories and decomposition diagrams.
"""

import logging
from typing import Any

from graphviz import Digraph

from adc import Adc
from doublecat import FiniteDoubleCat
from errors import GraycatError
from graymaps import DecompositionWitness

logger = logging.getLogger(__name__)


def adc_dot(adc: Adc) -> Digraph:
    """Hasse diagram of precedence: x → b for x in ∂⁻b, b → y for y in ∂⁺b."""
    graph = Digraph(adc.name or "adc", graph_attr={"rankdir": "LR"})
    names = {b: f"b{n}" for n, b in enumerate(adc.ids())}
    for b in adc.ids():
        graph.node(names[b], label=f"{b} ({adc.degree(b)})")
    for b in adc.ids():
        if adc.degree(b) == 0:
            continue
        boundary = adc.boundary(b)
        for x in sorted(boundary.negative_part().support()):
            graph.edge(names[x], names[b])
        for y in sorted(boundary.positive_part().support()):
            graph.edge(names[b], names[y])
    return graph


def double_dot(d: FiniteDoubleCat) -> Digraph:
    """One 2×2 cluster of corners per square; vertical cells dashed."""
    graph = Digraph(d.name or "double", graph_attr={"compound": "true"})
    for n, (alpha, b) in enumerate(d.squares.items()):
        with graph.subgraph(name=f"cluster_{n}") as cluster:
            cluster.attr(label=str(alpha[5]) if isinstance(alpha, tuple) and len(alpha) == 6 else str(alpha))
            corners = {
                "a": d.hsrc(b.top), "c": d.htgt(b.top),
                "b": d.hsrc(b.bottom), "d": d.htgt(b.bottom),
            }
            for key, obj in corners.items():
                cluster.node(f"s{n}{key}", label=str(obj))
            cluster.edge(f"s{n}a", f"s{n}c", label=str(b.top))
            cluster.edge(f"s{n}b", f"s{n}d", label=str(b.bottom))
            cluster.edge(f"s{n}a", f"s{n}b", label=str(b.left), style="dashed")
            cluster.edge(f"s{n}c", f"s{n}d", label=str(b.right), style="dashed")
    return graph


def witness_dot(witness: DecompositionWitness) -> Digraph:
    """Named diagram objects with their basis sizes, and the diagram arrows."""
    graph = Digraph("decomposition")
    names = {name: f"o{n}" for n, name in enumerate(witness.objects)}
    for name, adc in witness.objects.items():
        graph.node(names[name], label=f"{name}\n{list(adc.size_by_degree())}")
    for source, target, label in witness.arrows:
        graph.edge(names[source], names[target], label=label)
    return graph


def export_dot(value: Any) -> str:
    """DOT text of a complex, a double category or a decomposition witness.

    Raises:
        GraycatError: For any other kind of value
    """
    if isinstance(value, Adc):
        graph = adc_dot(value)
    elif isinstance(value, FiniteDoubleCat):
        graph = double_dot(value)
    elif isinstance(value, DecompositionWitness):
        graph = witness_dot(value)
    else:
        raise GraycatError(f"no DOT rendering for {type(value).__name__}")
    logger.debug("rendered %s as DOT", type(value).__name__)
    return graph.source
