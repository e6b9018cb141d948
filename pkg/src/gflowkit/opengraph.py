"""Open graphs: a simple graph with designated input and output vertices.

Vertex sets are plain ``int`` bit masks (bit ``i`` is vertex ``i``).  Use
:meth:`OpenGraph.mask` and :meth:`OpenGraph.names` to convert to and from
vertex labels.
"""

from __future__ import annotations

import json
import re
import warnings
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from .gf2 import BitMatrix

#: Above this many vertices the 2^n subset enumerations become impractical.
SOFT_VERTEX_CAP = 32


class GraphError(ValueError):
    """Invalid open graph data."""


class CapExceeded(GraphError):
    """A size cap or resource limit would be exceeded."""


class ParseError(GraphError):
    """Malformed graph description; ``lineno`` is 1-based."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        prefix = f"line {lineno}: " if lineno is not None else ""
        super().__init__(prefix + message)


def bits(mask: int) -> Iterable[int]:
    """Indices of the set bits of ``mask``, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _natural_key(label: str):
    return [int(t) if t.isdigit() else t for t in re.split(r"(\d+)", label)]


@dataclass(frozen=True)
class OpenGraph:
    """An open graph ``(G, I, O)``.

    Attributes
    ----------
    labels : tuple[str, ...]
        Vertex names; vertex ``i`` is ``labels[i]``.
    adj : tuple[int, ...]
        Neighbourhood bit mask of each vertex.
    inputs, outputs : int
        Bit masks of the input and output sets.  They may overlap.
    """

    labels: tuple[str, ...]
    adj: tuple[int, ...]
    inputs: int = 0
    outputs: int = 0

    def __post_init__(self) -> None:
        n = len(self.labels)
        if len(self.adj) != n:
            raise GraphError("adjacency length differs from vertex count")
        if len(set(self.labels)) != n:
            raise GraphError("duplicate vertex label")
        full = (1 << n) - 1
        for v, nb in enumerate(self.adj):
            if nb & ~full:
                raise GraphError(f"vertex {self.labels[v]} has a neighbour outside the graph")
            if (nb >> v) & 1:
                raise GraphError(f"self-loop on {self.labels[v]}")
            for w in bits(nb):
                if not (self.adj[w] >> v) & 1:
                    raise GraphError("adjacency is not symmetric")
        if (self.inputs | self.outputs) & ~full:
            raise GraphError("input/output set outside the graph")

    # construction ---------------------------------------------------------

    @classmethod
    def from_edges(
        cls,
        vertices: int | Sequence[str],
        edges: Iterable[tuple],
        inputs: Iterable = (),
        outputs: Iterable = (),
    ) -> OpenGraph:
        """Build from an edge list.

        ``vertices`` is either a count (labels ``v1..vn``) or a label list.
        Edge endpoints and I/O members may be indices or labels.
        """
        if isinstance(vertices, int):
            labels = tuple(f"v{i + 1}" for i in range(vertices))
        else:
            labels = tuple(vertices)
        index = {lab: i for i, lab in enumerate(labels)}

        def idx(v) -> int:
            if isinstance(v, str):
                if v not in index:
                    raise GraphError(f"unknown vertex {v!r}")
                return index[v]
            if not 0 <= v < len(labels):
                raise GraphError(f"vertex index {v} out of range")
            return v

        adj = [0] * len(labels)
        for a, b in edges:
            a, b = idx(a), idx(b)
            if a == b:
                raise GraphError(f"self-loop on {labels[a]}")
            adj[a] |= 1 << b
            adj[b] |= 1 << a
        imask = sum(1 << i for i in {idx(v) for v in inputs})
        omask = sum(1 << i for i in {idx(v) for v in outputs})
        return cls(labels, tuple(adj), imask, omask)

    def with_io(self, inputs: int, outputs: int) -> OpenGraph:
        return OpenGraph(self.labels, self.adj, inputs, outputs)

    def bare(self) -> OpenGraph:
        """The same graph with no inputs or outputs."""
        return self.with_io(0, 0)

    def swapped(self) -> OpenGraph:
        """``(G, O, I)``."""
        return self.with_io(self.outputs, self.inputs)

    # basic accessors ------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    @property
    def non_outputs(self) -> int:
        """O^C, the measured vertices."""
        return self.full & ~self.outputs

    @property
    def non_inputs(self) -> int:
        """I^C, the vertices prepared in |+>."""
        return self.full & ~self.inputs

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise GraphError(f"unknown vertex {label!r}") from None

    def mask(self, vertices: Iterable) -> int:
        """Bit mask of a collection of labels or indices."""
        m = 0
        for v in vertices:
            i = self.index(v) if isinstance(v, str) else v
            if not 0 <= i < self.n:
                raise GraphError(f"vertex index {i} out of range")
            m |= 1 << i
        return m

    def names(self, mask: int) -> list[str]:
        return [self.labels[i] for i in bits(mask)]

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def edges(self) -> list[tuple[int, int]]:
        return [(a, b) for a in range(self.n) for b in bits(self.adj[a]) if a < b]

    def num_edges(self) -> int:
        return sum(nb.bit_count() for nb in self.adj) // 2

    def edges_within(self, s: int) -> int:
        """Number of edges with both ends in ``s``."""
        return sum((self.adj[v] & s).bit_count() for v in bits(s)) // 2

    # neighbourhood combinatorics -------------------------------------------

    def odd(self, s: int) -> int:
        """Odd(s): vertices with an odd number of neighbours in ``s``."""
        out = 0
        for v in bits(s):
            out ^= self.adj[v]
        return out

    def local_set(self, w: int) -> int:
        """L(w) = Odd(w) | w."""
        return self.odd(w) | w

    def induced_matrix(self, row_set: int | None = None, col_set: int | None = None) -> BitMatrix:
        """Adjacency submatrix with rows ``row_set`` and columns ``col_set``.

        Defaults to rows O^C and columns I^C.  Rows and columns follow
        ascending vertex index and carry the vertex indices as labels.
        """
        if row_set is None:
            row_set = self.non_outputs
        if col_set is None:
            col_set = self.non_inputs
        cols = list(bits(col_set))
        rows_idx = list(bits(row_set))
        rows = []
        for u in rows_idx:
            nb = self.adj[u]
            rows.append(sum(1 << j for j, v in enumerate(cols) if (nb >> v) & 1))
        return BitMatrix(tuple(rows), len(cols), tuple(rows_idx), tuple(cols))

    def subgraph(self, keep: int) -> OpenGraph:
        """Induced subgraph on ``keep``; I and O are intersected with ``keep``."""
        kept = list(bits(keep))
        pos = {v: i for i, v in enumerate(kept)}
        adj = tuple(sum(1 << pos[w] for w in bits(self.adj[v] & keep)) for v in kept)

        def remap(m: int) -> int:
            return sum(1 << pos[v] for v in bits(m & keep))

        return OpenGraph(tuple(self.labels[v] for v in kept), adj, remap(self.inputs), remap(self.outputs))

    def io_extension(self) -> OpenGraph:
        """Replace every input and output by a fresh pendant vertex.

        Fresh vertices are appended after the originals, inputs first, and
        named after the vertex they hang from with a trailing ``'``.
        """
        labels = list(self.labels)
        adj = list(self.adj)
        used = set(labels)
        new_inputs = 0
        new_outputs = 0
        for is_input, members in ((True, self.inputs), (False, self.outputs)):
            for v in bits(members):
                name = labels[v] + "'"
                while name in used:
                    name += "'"
                used.add(name)
                w = len(labels)
                labels.append(name)
                adj.append(1 << v)
                adj[v] |= 1 << w
                if is_input:
                    new_inputs |= 1 << w
                else:
                    new_outputs |= 1 << w
        return OpenGraph(tuple(labels), tuple(adj), new_inputs, new_outputs)

    # serialisation --------------------------------------------------------

    def dumps(self) -> str:
        """Text form accepted by :func:`parse`."""
        lines = ["vertices: " + " ".join(self.labels)]
        lines += [f"edge: {self.labels[a]} {self.labels[b]}" for a, b in self.edges()]
        lines.append("inputs: " + " ".join(self.names(self.inputs)))
        lines.append("outputs: " + " ".join(self.names(self.outputs)))
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "labels": list(self.labels),
            "edges": [list(e) for e in self.edges()],
            "inputs": list(bits(self.inputs)),
            "outputs": list(bits(self.outputs)),
        }

    @classmethod
    def from_dict(cls, data: dict) -> OpenGraph:
        n = data["n"]
        labels = data.get("labels") or [f"v{i + 1}" for i in range(n)]
        if len(labels) != n:
            raise GraphError("label count differs from n")
        return cls.from_edges(list(labels), [tuple(e) for e in data["edges"]], data["inputs"], data["outputs"])

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> OpenGraph:
        return cls.from_dict(json.loads(text))

    def __repr__(self) -> str:
        return (
            f"OpenGraph(n={self.n}, edges={[(self.labels[a], self.labels[b]) for a, b in self.edges()]}, "
            f"inputs={self.names(self.inputs)}, outputs={self.names(self.outputs)})"
        )


def parse(text: str) -> OpenGraph:
    """Parse the line-oriented graph format.

    ::

        # comment
        vertices: v1 v2 v3
        edge: v1 v2
        inputs: v1
        outputs: v3

    Sections may appear in any order.  Without a ``vertices:`` line the
    vertex set is whatever appears in edges, in natural sort order.
    """
    declared: list[str] | None = None
    edges: list[tuple[str, str, int]] = []
    io: dict[str, tuple[list[str], int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, rest = line.partition(":")
        key = key.strip().lower()
        if not sep:
            raise ParseError(f"expected 'key: value', got {raw.strip()!r}", lineno)
        names = rest.split()
        if key == "vertices":
            declared = (declared or []) + names
        elif key == "edge":
            if len(names) != 2:
                raise ParseError("an edge needs exactly two endpoints", lineno)
            a, b = names
            if a == b:
                raise ParseError(f"self-loop on {a}", lineno)
            edges.append((a, b, lineno))
        elif key in ("inputs", "outputs"):
            if key in io:
                raise ParseError(f"duplicate '{key}' line", lineno)
            io[key] = (names, lineno)
        else:
            raise ParseError(f"unknown key {key!r}", lineno)

    if declared is not None:
        if len(set(declared)) != len(declared):
            raise ParseError("duplicate vertex in 'vertices' line")
        labels = declared
    else:
        seen = {v for a, b, _ in edges for v in (a, b)}
        labels = sorted(seen, key=_natural_key)
    known = set(labels)

    pairs = set()
    for a, b, lineno in edges:
        for v in (a, b):
            if v not in known:
                raise ParseError(f"unknown vertex {v!r}", lineno)
        key = frozenset((a, b))
        if key in pairs:
            raise ParseError(f"duplicate edge {a} {b}", lineno)
        pairs.add(key)
    for names, lineno in io.values():
        for v in names:
            if v not in known:
                raise ParseError(f"unknown vertex {v!r}", lineno)

    if len(labels) > SOFT_VERTEX_CAP:
        warnings.warn(
            f"{len(labels)} vertices exceeds the soft cap of {SOFT_VERTEX_CAP}; "
            "subset enumerations will be slow",
            stacklevel=2,
        )
    return OpenGraph.from_edges(
        labels,
        [(a, b) for a, b, _ in edges],
        io.get("inputs", ([], 0))[0],
        io.get("outputs", ([], 0))[0],
    )


def load(path) -> OpenGraph:
    """Read a graph file; ``.json`` files use the JSON form."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if str(path).endswith(".json"):
        try:
            return OpenGraph.from_json(text)
        except (KeyError, TypeError, json.JSONDecodeError) as exc:
            raise ParseError(f"bad graph JSON: {exc}") from exc
    return parse(text)


def to_dot(g: OpenGraph, highlight: dict[int, int] | None = None, name: str = "G") -> str:
    """Graphviz DOT text.

    Inputs are drawn as boxes, outputs unfilled, everything else filled
    black.  ``highlight`` maps a vertex to a bit mask of successors; those
    arcs are overlaid in red with an arrowhead (e.g. a gflow DAG).
    """
    out = [f"graph {name} {{", "  node [style=filled, fillcolor=black, fontcolor=white];"]
    for v, lab in enumerate(g.labels):
        attrs = []
        if (g.inputs >> v) & 1:
            attrs.append("shape=box")
        if (g.outputs >> v) & 1:
            attrs += ["fillcolor=white", "fontcolor=black"]
        out.append(f'  "{lab}"' + (f" [{', '.join(attrs)}]" if attrs else "") + ";")
    for a, b in g.edges():
        out.append(f'  "{g.labels[a]}" -- "{g.labels[b]}";')
    for u, succ in sorted((highlight or {}).items()):
        for v in bits(succ):
            out.append(f'  "{g.labels[u]}" -- "{g.labels[v]}" [dir=forward, color=red, constraint=false];')
    out.append("}")
    return "\n".join(out) + "\n"
