"""Exhaustive families of small open graphs for sweeps and regression checks.

Bare graphs come from the networkx graph atlas (every graph on at most
seven vertices, one per isomorphism class).  Input/output choices are then
reduced to one per orbit of the graph's automorphism group.
"""

from __future__ import annotations

from collections.abc import Iterator

import networkx as nx

from .chooser import _permute, automorphisms
from .opengraph import OpenGraph

#: The atlas covers graphs up to this many vertices.
ATLAS_MAX_VERTICES = 7


def atlas(nmax: int, connected: bool = False, nmin: int = 1) -> Iterator[OpenGraph]:
    """Bare graphs with ``nmin <= n <= nmax`` vertices, one per isomorphism class."""
    if nmax > ATLAS_MAX_VERTICES:
        raise ValueError(f"the graph atlas stops at {ATLAS_MAX_VERTICES} vertices")
    for g in nx.graph_atlas_g():
        n = g.number_of_nodes()
        if n < nmin:
            continue
        if n > nmax:
            break
        if connected and not nx.is_connected(g):
            continue
        yield OpenGraph.from_edges(n, list(g.edges()))


def io_orbits(og: OpenGraph, disjoint: bool = False, balanced: bool = False) -> Iterator[OpenGraph]:
    """One open graph per automorphism orbit of ``(I, O)`` pairs on ``og``.

    Parameters
    ----------
    disjoint : bool
        Only pairs with ``I`` and ``O`` disjoint.
    balanced : bool
        Only pairs with ``|I| = |O|``.
    """
    autos = [p for p in automorphisms(og) if p != tuple(range(og.n))]
    seen: set[tuple[int, int]] = set()
    size = 1 << og.n
    for i in range(size):
        for o in range(size):
            if (disjoint and i & o) or (balanced and i.bit_count() != o.bit_count()):
                continue
            if (i, o) in seen:
                continue
            for p in autos:
                seen.add((_permute(i, p), _permute(o, p)))
            yield og.with_io(i, o)


def open_graphs(
    nmax: int,
    connected: bool = False,
    disjoint: bool = False,
    balanced: bool = False,
    nmin: int = 1,
) -> Iterator[OpenGraph]:
    """All open graphs up to isomorphism with at most ``nmax`` vertices."""
    for og in atlas(nmax, connected, nmin):
        yield from io_orbits(og, disjoint, balanced)


def pendant_one_to_one(nmax: int) -> Iterator[OpenGraph]:
    """Connected graphs with one degree-1 input and a different degree-1 output.

    Placements are reduced by automorphisms.
    """
    for og in atlas(nmax, connected=True, nmin=2):
        leaves = [v for v in range(og.n) if og.degree(v) == 1]
        pairs = [(1 << a, 1 << b) for a in leaves for b in leaves if a != b]
        autos = automorphisms(og)
        seen = set()
        for i, o in pairs:
            key = min((_permute(i, p), _permute(o, p)) for p in autos)
            if key not in seen:
                seen.add(key)
                yield og.with_io(i, o)
