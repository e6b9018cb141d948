"""Choosing inputs and outputs on a bare graph.

For a vertex set ``A`` the *violating collection* holds every nonempty
``S`` whose odd neighbourhood leaves ``S`` only through ``A``.  An
input/output pair yields equiprobable computations exactly when the outputs
hit every set of the collection for ``A = I``.  With ``|I| = |O|``
equiprobability and gflow coincide, the roles of inputs and outputs can be
swapped, and so the inputs must also hit the collection for ``A = {}``;
:func:`choose_io` uses that to prune and double-checks gflow per placement.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .classify import DEFAULT_CAP, _odd_table, _sorted_sets, _subset_key, internal_sets
from .flow import find_gflow
from .opengraph import CapExceeded, GraphError, OpenGraph, bits

#: Automorphism search refuses graphs with more vertices than this.
AUTOMORPHISM_CAP = 10


@dataclass(frozen=True)
class ViolatingCollection:
    """Every nonempty ``S`` with ``Odd(S) & ~S & ~base == 0``, ordered by size then lex."""

    base: int
    sets: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.sets)

    def __iter__(self):
        return iter(self.sets)


@dataclass(frozen=True)
class IoPlacement:
    """Input and output masks proposed for a bare graph."""

    inputs: int
    outputs: int
    has_gflow: bool

    def to_dict(self, og: OpenGraph, representative: bool | None = None) -> dict:
        data = {
            "inputs": og.names(self.inputs),
            "outputs": og.names(self.outputs),
            "has_gflow": self.has_gflow,
        }
        if representative is not None:
            data["orbit_representative"] = representative
        if self.has_gflow:
            f = find_gflow(og.with_io(self.inputs, self.outputs))
            data["gflow"] = None if f is None else f.to_dict()
        return data


def violating_collection(og: OpenGraph, a: int, cap: int = DEFAULT_CAP) -> ViolatingCollection:
    """All nonempty vertex sets whose odd neighbourhood escapes only into ``a``.

    Inputs and outputs of ``og`` are ignored.
    """
    s, odd = _odd_table(og, og.full, cap)
    return ViolatingCollection(a, tuple(_sorted_sets(s[(odd & ~s & ~a) == 0])))


def is_transversal(s: int, c: ViolatingCollection) -> bool:
    """Does ``s`` meet every member of ``c``?"""
    return all(s & t for t in c.sets)


def minimal_transversals(c: ViolatingCollection, size_cap: int) -> list[int]:
    """Inclusion-minimal transversals of at most ``size_cap`` vertices.

    Branches on the vertices of the first set not yet hit, which
    enumerates a superset of the minimal hitting sets; non-minimal ones are
    filtered at the end.
    """
    if size_cap < 1 and c.sets:
        return []
    found: set[int] = set()

    def grow(chosen: int) -> None:
        missed = next((t for t in c.sets if not t & chosen), None)
        if missed is None:
            found.add(chosen)
            return
        if chosen.bit_count() == size_cap:
            return
        for v in bits(missed):
            grow(chosen | 1 << v)

    grow(0)
    minimal = [
        t for t in found if not any(is_transversal(t & ~(1 << v), c) for v in bits(t))
    ]
    return sorted(minimal, key=_subset_key)


def _permute(mask: int, perm: tuple[int, ...]) -> int:
    out = 0
    for v in bits(mask):
        out |= 1 << perm[v]
    return out


def automorphisms(og: OpenGraph) -> list[tuple[int, ...]]:
    """All adjacency-preserving vertex permutations (``perm[v]`` is the image of ``v``).

    Backtracking assigns images in index order, pruning on degree and on
    adjacency to already placed vertices.  Inputs and outputs are ignored.
    """
    n = og.n
    if n > AUTOMORPHISM_CAP:
        raise CapExceeded(f"automorphism search is capped at {AUTOMORPHISM_CAP} vertices, got {n}")
    deg = [og.degree(v) for v in range(n)]
    perm = [-1] * n
    used = 0
    result: list[tuple[int, ...]] = []

    def place(v: int) -> None:
        nonlocal used
        if v == n:
            result.append(tuple(perm))
            return
        for w in range(n):
            if (used >> w) & 1 or deg[w] != deg[v]:
                continue
            if any(((og.adj[v] >> u) & 1) != ((og.adj[w] >> perm[u]) & 1) for u in range(v)):
                continue
            perm[v] = w
            used |= 1 << w
            place(v + 1)
            used &= ~(1 << w)
        perm[v] = -1

    place(0)
    return result


def canonical_placement(
    pair: tuple[int, int], autos: list[tuple[int, ...]]
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Lexicographically least image of ``(I, O)`` under the automorphisms, as index tuples."""
    return min(
        (tuple(sorted(bits(_permute(pair[0], p)))), tuple(sorted(bits(_permute(pair[1], p)))))
        for p in autos
    )


def dedupe_by_symmetry(og: OpenGraph, placements: list[IoPlacement]) -> list[IoPlacement]:
    """One placement per automorphism orbit, namely the least image; sorted."""
    autos = automorphisms(og)
    seen: dict[tuple, IoPlacement] = {}
    for p in placements:
        key = canonical_placement((p.inputs, p.outputs), autos)
        if key not in seen:
            i, o = (sum(1 << v for v in part) for part in key)
            seen[key] = IoPlacement(i, o, p.has_gflow)
    return [seen[k] for k in sorted(seen)]


def choose_io(og: OpenGraph, k: int, cap: int = DEFAULT_CAP) -> list[IoPlacement]:
    """All placements with ``k`` inputs and ``k`` outputs that admit equiprobability.

    Every ``k``-subset is tried, not only minimal transversals.  Inputs and
    outputs may share vertices.  Each placement records whether a gflow was
    actually found.

    Raises
    ------
    CapExceeded
        If ``k`` exceeds the vertex count or the graph exceeds ``cap``.
    """
    og = og.bare()
    if k > og.n or k < 0:
        raise CapExceeded(f"cannot pick {k} inputs from {og.n} vertices")
    base = violating_collection(og, 0, cap)
    out = []
    for i_set in combinations(range(og.n), k):
        inputs = sum(1 << v for v in i_set)
        if not is_transversal(inputs, base):
            continue
        coll = violating_collection(og, inputs, cap)
        for o_set in combinations(range(og.n), k):
            outputs = sum(1 << v for v in o_set)
            if is_transversal(outputs, coll):
                has = find_gflow(og.with_io(inputs, outputs)) is not None
                out.append(IoPlacement(inputs, outputs, has))
    return out


def monotonicity_check(og: OpenGraph, i2: int, o2: int, cap: int = DEFAULT_CAP) -> bool:
    """Equiprobability of ``(G, i2, o2)`` where ``i2`` shrinks the inputs and ``o2`` grows the outputs."""
    if i2 & ~og.inputs or og.outputs & ~o2:
        raise GraphError("needs i2 inside the inputs and o2 containing the outputs")
    return not internal_sets(og.with_io(i2, o2), cap)
