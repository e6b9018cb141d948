"""Generalised flow (gflow) search, verification, focusing and reversal.

A gflow of ``(G, I, O)`` is a map ``g: O^C -> 2^(I^C)`` with a strict order
``<`` such that for every measured ``u``:

* ``v in g(u)`` implies ``u < v``;
* ``u in Odd(g(u))``;
* ``v in Odd(g(u))`` and ``v != u`` implies ``u < v``.

Orders are stored as layer numbers: outputs sit in layer 0 and ``u < v``
iff ``layer[u] > layer[v]`` (higher layers are measured earlier).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from . import gf2
from .gf2 import BitMatrix
from .opengraph import OpenGraph, bits


class FlowError(ValueError):
    """Invalid flow object or violated precondition."""


@dataclass(frozen=True, eq=False)
class GFlow:
    """A correction function together with its layered order."""

    graph: OpenGraph
    g: dict[int, int]
    layers: dict[int, int]

    def precedes(self, u: int, v: int) -> bool:
        return self.layers[u] > self.layers[v]

    def to_dict(self) -> dict:
        og = self.graph
        return {
            "g": {og.labels[u]: og.names(k) for u, k in sorted(self.g.items())},
            "layers": {og.labels[v]: lay for v, lay in sorted(self.layers.items())},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _topological_layers(n: int, succ: dict[int, int]) -> dict[int, int] | None:
    """Longest-path-to-sink layer of each vertex, or None if ``succ`` has a cycle."""
    layers: dict[int, int] = {}
    state = [0] * n  # 0 new, 1 on stack, 2 done

    for root in range(n):
        if state[root]:
            continue
        stack = [(root, iter(bits(succ.get(root, 0))))]
        state[root] = 1
        while stack:
            v, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                stack.pop()
                state[v] = 2
                layers[v] = 1 + max((layers[w] for w in bits(succ.get(v, 0))), default=-1)
            elif state[nxt] == 1:
                return None
            elif state[nxt] == 0:
                state[nxt] = 1
                stack.append((nxt, iter(bits(succ.get(nxt, 0)))))
    return layers


@dataclass(frozen=True, eq=False)
class FocusedGFlow:
    """Focused gflow: extensive and ``Odd(g(u)) & O^C == {u}`` for every ``u``.

    Both conditions are checked on construction; :class:`FlowError` is raised
    otherwise.
    """

    graph: OpenGraph
    g: dict[int, int]
    layers: dict[int, int] = field(init=False)

    def __post_init__(self) -> None:
        og = self.graph
        if set(self.g) != set(bits(og.non_outputs)):
            raise FlowError("focused gflow must be defined exactly on the non-outputs")
        for u, k in self.g.items():
            if k & ~og.non_inputs:
                raise FlowError(f"g({og.labels[u]}) contains an input")
            if og.odd(k) & og.non_outputs != 1 << u:
                raise FlowError(f"Odd(g({og.labels[u]})) meets the non-outputs outside {og.labels[u]}")
        layers = _topological_layers(og.n, self.g)
        if layers is None:
            raise FlowError("successor relation has a cycle")
        object.__setattr__(self, "layers", layers)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FocusedGFlow):
            return NotImplemented
        return self.graph == other.graph and self.g == other.g

    def as_gflow(self) -> GFlow:
        return GFlow(self.graph, dict(self.g), dict(self.layers))

    def to_dict(self) -> dict:
        return self.as_gflow().to_dict()

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


@dataclass(frozen=True, eq=False)
class Dag:
    """Directed acyclic graph on the vertices of ``graph``; ``succ`` holds out-neighbourhoods."""

    graph: OpenGraph
    succ: dict[int, int]

    def __post_init__(self) -> None:
        if _topological_layers(self.graph.n, self.succ) is None:
            raise FlowError("directed graph has a cycle")

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u, s in sorted(self.succ.items()) for v in bits(s)]

    def matrix(self) -> BitMatrix:
        """Adjacency restricted to rows I^C and columns O^C; column ``u`` is ``succ[u]``."""
        og = self.graph
        rows_idx = list(bits(og.non_inputs))
        cols = list(bits(og.non_outputs))
        rows = []
        for v in rows_idx:
            rows.append(sum(1 << j for j, u in enumerate(cols) if (self.succ.get(u, 0) >> v) & 1))
        return BitMatrix(tuple(rows), len(cols), tuple(rows_idx), tuple(cols))


def find_gflow(og: OpenGraph) -> GFlow | None:
    """Search a gflow by peeling layers backwards from the outputs.

    Each round solves ``Odd(K) & unassigned == {u}`` for every unassigned
    ``u`` with ``K`` ranging over already-assigned non-inputs.  Returns
    ``None`` when a round makes no progress.
    """
    assigned = og.outputs
    layers = {v: 0 for v in bits(og.outputs)}
    g: dict[int, int] = {}
    layer = 0
    while True:
        unassigned = og.full & ~assigned
        if not unassigned:
            return GFlow(og, g, layers)
        layer += 1
        m = og.induced_matrix(unassigned, assigned & og.non_inputs)
        cols = m.col_labels
        found = {}
        for i, u in enumerate(m.row_labels):
            x = gf2.solve(m, 1 << i)
            if x is not None:
                found[u] = sum(1 << cols[j] for j in bits(x))
        if not found:
            return None
        for u, k in found.items():
            g[u] = k
            layers[u] = layer
            assigned |= 1 << u


def has_gflow(og: OpenGraph) -> bool:
    return find_gflow(og) is not None


def verify_gflow(og: OpenGraph, f: GFlow) -> bool:
    """Check the three gflow conditions under ``f.layers``."""
    if set(f.g) != set(bits(og.non_outputs)) or set(f.layers) != set(range(og.n)):
        return False
    for u, k in f.g.items():
        if k & ~og.non_inputs:
            return False
        if any(not f.precedes(u, v) for v in bits(k)):
            return False
        odd = og.odd(k)
        if not (odd >> u) & 1:
            return False
        if any(not f.precedes(u, v) for v in bits(odd & ~(1 << u))):
            return False
    return True


def focus(og: OpenGraph, f: GFlow) -> FocusedGFlow:
    """Turn a gflow into a focused one, working outwards from the outputs.

    ``g_f(u) = g(u) ^ XOR of g_f(v)`` over the other measured vertices ``v``
    in ``Odd(g(u))``; those all lie in lower layers and are done first.
    """
    if not verify_gflow(og, f):
        raise FlowError("input is not a valid gflow")
    gf: dict[int, int] = {}
    for u in sorted(f.g, key=lambda v: f.layers[v]):
        k = f.g[u]
        for v in bits(og.odd(f.g[u]) & og.non_outputs & ~(1 << u)):
            k ^= gf[v]
        gf[u] = k
    return FocusedGFlow(og, gf)


def focused_to_dag(f: FocusedGFlow) -> Dag:
    """The DAG whose out-neighbourhoods are the focused correction sets."""
    return Dag(f.graph, dict(f.g))


def dag_to_focused(og: OpenGraph, d: Dag) -> FocusedGFlow:
    """Read a focused gflow off a DAG right inverse of the induced matrix."""
    if d.graph.n != og.n:
        raise FlowError("DAG and graph have different vertex sets")
    for v in bits(og.outputs):
        if d.succ.get(v, 0):
            raise FlowError("outputs must have no successors")
    prod = gf2.multiply(og.induced_matrix(), d.matrix())
    if prod.rows != BitMatrix.identity(prod.nrows).rows or prod.ncols != prod.nrows:
        raise FlowError("DAG is not a right inverse of the induced adjacency matrix")
    return FocusedGFlow(og, {u: d.succ.get(u, 0) for u in bits(og.non_outputs)})


def _require_square(og: OpenGraph) -> None:
    if og.inputs.bit_count() != og.outputs.bit_count():
        raise FlowError(
            f"needs |I| = |O|, got |I|={og.inputs.bit_count()} and |O|={og.outputs.bit_count()}"
        )


def reverse_gflow(og: OpenGraph) -> FocusedGFlow | None:
    """Focused gflow of ``(G, O, I)`` from the transpose of the forward DAG."""
    _require_square(og)
    f = find_gflow(og)
    if f is None:
        return None
    ff = focus(og, f)
    back: dict[int, int] = {v: 0 for v in bits(og.non_inputs)}
    for u, k in ff.g.items():
        for v in bits(k):
            back[v] |= 1 << u
    return FocusedGFlow(og.swapped(), back)


def find_gflow_square(og: OpenGraph) -> FocusedGFlow | None:
    """Focused gflow for ``|I| = |O|`` by inverting the induced matrix.

    The inverse is the only candidate; it is a gflow iff its successor
    relation is acyclic.
    """
    _require_square(og)
    m = og.induced_matrix()
    inv = gf2.invert(m)
    if inv is None:
        return None
    rows = inv.row_labels  # I^C
    g = {}
    for j, u in enumerate(inv.col_labels):  # O^C
        g[u] = sum(1 << rows[i] for i in bits(inv.column(j)))
    if _topological_layers(og.n, g) is None:
        return None
    return FocusedGFlow(og, g)
