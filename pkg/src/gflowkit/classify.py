"""Decide the determinism classes of an open graph and build certificates.

Three nested classes are recognised:

* **deterministic** - the open graph has a gflow;
* **equiprobable** - no *internal set*, i.e. no nonempty ``W`` among the
  measured vertices with ``Odd(W)`` inside ``W | I``;
* **constant probability** - no *strongly internal set*, an internal set
  whose local set ``W | Odd(W)`` meets the inputs.

Set enumeration is exhaustive over subsets of the measured vertices, so the
measured part is capped (``DEFAULT_CAP``) to keep the ``2^k`` loop bounded.

When a class fails, :func:`make_witness` and
:func:`make_distinguishing_witness` return explicit measurement settings
under which the simulator exhibits a forbidden or input-dependent branch.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import sim
from .flow import FocusedGFlow, find_gflow, focus
from .opengraph import CapExceeded, GraphError, OpenGraph, bits

#: Largest number of measured vertices whose subsets are enumerated.
DEFAULT_CAP = 24


def _subset_key(mask: int) -> tuple[int, tuple[int, ...]]:
    return mask.bit_count(), tuple(bits(mask))


def _odd_table(og: OpenGraph, ground: int, cap: int, within: int | None = None):
    """Arrays ``(W, Odd(W) & within)`` over every nonempty ``W`` inside ``ground``.

    Both arrays are built by doubling: adding vertex ``v`` to every subset
    found so far XORs its neighbourhood into the odd set.
    """
    verts = list(bits(ground))
    if len(verts) > cap:
        raise CapExceeded(
            f"{len(verts)} vertices to enumerate exceeds cap {cap}; raise it with --cap"
        )
    within = og.full if within is None else within
    w = np.zeros(1, dtype=np.int64)
    odd = np.zeros(1, dtype=np.int64)
    for v in verts:
        w = np.concatenate([w, w | (1 << v)])
        odd = np.concatenate([odd, odd ^ (og.adj[v] & within)])
    return w[1:], odd[1:]


def _sorted_sets(masks: np.ndarray) -> list[int]:
    return sorted((int(m) for m in masks), key=_subset_key)


def internal_sets(og: OpenGraph, cap: int = DEFAULT_CAP) -> list[int]:
    """All internal sets, ordered by size and then lexicographically.

    Parameters
    ----------
    og : OpenGraph
    cap : int
        Maximum number of measured vertices to enumerate over.

    Returns
    -------
    list of int
        Vertex masks ``W`` with ``W`` nonempty, ``W`` measured and
        ``Odd(W)`` contained in ``W | I``.

    Raises
    ------
    CapExceeded
        If there are more than ``cap`` measured vertices.
    """
    w, odd = _odd_table(og, og.non_outputs, cap)
    return _sorted_sets(w[(odd & ~(w | og.inputs)) == 0])


def strongly_internal_sets(og: OpenGraph, cap: int = DEFAULT_CAP) -> list[int]:
    """Internal sets whose local set meets the inputs."""
    return [w for w in internal_sets(og, cap) if og.local_set(w) & og.inputs]


@dataclass(frozen=True, eq=False)
class ClassificationReport:
    """Class membership of an open graph together with its certificates.

    Attributes
    ----------
    graph : OpenGraph
    has_gflow, equiprobable, constant_probability : bool
        Verdicts, which always satisfy
        ``has_gflow -> equiprobable -> constant_probability``.
    gflow : FocusedGFlow or None
        Focused gflow when one exists.
    internal_sets, strongly_internal_sets : tuple of int
        The violating sets behind a negative verdict (vertex masks).
    notes : str
    """

    graph: OpenGraph
    has_gflow: bool
    equiprobable: bool
    constant_probability: bool
    gflow: FocusedGFlow | None
    internal_sets: tuple[int, ...]
    strongly_internal_sets: tuple[int, ...]
    notes: str = ""

    def to_dict(self) -> dict:
        og = self.graph
        return {
            "has_gflow": self.has_gflow,
            "equiprobable": self.equiprobable,
            "constant_probability": self.constant_probability,
            "gflow": None if self.gflow is None else self.gflow.to_dict(),
            "internal_sets": [og.names(w) for w in self.internal_sets],
            "strongly_internal_sets": [og.names(w) for w in self.strongly_internal_sets],
            "notes": self.notes,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def classify(og: OpenGraph, cap: int = DEFAULT_CAP) -> ClassificationReport:
    """Classify ``og`` and attach the certifying objects."""
    f = find_gflow(og)
    gf = None if f is None else focus(og, f)
    internal = tuple(internal_sets(og, cap))
    strong = tuple(w for w in internal if og.local_set(w) & og.inputs)
    notes = []
    if og.inputs.bit_count() > og.outputs.bit_count():
        notes.append("more inputs than outputs: no gflow is possible")
    if og.inputs.bit_count() == og.outputs.bit_count() and (gf is None) != bool(internal):
        notes.append("equal input and output counts but gflow and equiprobability disagree")
    return ClassificationReport(
        graph=og,
        has_gflow=gf is not None,
        equiprobable=not internal,
        constant_probability=not strong,
        gflow=gf,
        internal_sets=internal,
        strongly_internal_sets=strong,
        notes="; ".join(notes),
    )


def _require_balanced(og: OpenGraph) -> None:
    if og.inputs.bit_count() != og.outputs.bit_count():
        raise GraphError(
            f"needs |I| = |O|, got |I|={og.inputs.bit_count()} and |O|={og.outputs.bit_count()}"
        )


def collapse_check(og: OpenGraph, cap: int = DEFAULT_CAP) -> bool:
    """With ``|I| = |O|``: is equiprobability equivalent to having a gflow here?"""
    _require_balanced(og)
    return (not internal_sets(og, cap)) == (find_gflow(og) is not None)


def decompose(og: OpenGraph, cap: int = DEFAULT_CAP) -> tuple[int, int]:
    """Split off even parts until the rest has a gflow.

    Repeatedly removes the first set ``W`` of measured non-input vertices
    whose odd neighbourhood, taken in the remaining graph, lies inside
    ``W``.  Requires ``|I| = |O|`` and constant probability.

    Returns
    -------
    kept, removed : int
        Vertex masks in the numbering of ``og``.  The open graph induced on
        ``kept`` has a gflow.
    """
    _require_balanced(og)
    if strongly_internal_sets(og, cap):
        raise GraphError("decomposition needs an open graph with constant probability")
    kept = og.full
    while True:
        ground = kept & og.non_outputs & og.non_inputs
        w, odd = _odd_table(og, ground, cap, within=kept)
        found = _sorted_sets(w[(odd & ~w) == 0])
        if not found:
            break
        kept &= ~found[0]
    if find_gflow(og.subgraph(kept)) is None:
        raise GraphError("remaining open graph has no gflow")
    return kept, og.full & ~kept


def eulerian_test(og: OpenGraph) -> bool:
    """Constant-probability test for one pendant input and one pendant output.

    True iff every vertex that is neither input nor output has even degree
    in the whole graph.

    Raises
    ------
    GraphError
        Unless ``|I| = |O| = 1``, the input and output differ, and both
        have degree 1.
    """
    if og.inputs.bit_count() != 1 or og.outputs.bit_count() != 1:
        raise GraphError("needs exactly one input and one output")
    if og.inputs == og.outputs:
        raise GraphError("input and output must be distinct vertices")
    for v in bits(og.inputs | og.outputs):
        if og.degree(v) != 1:
            raise GraphError(f"{og.labels[v]} must have degree 1; apply io_extension first")
    interior = og.non_inputs & og.non_outputs
    return all(og.degree(v) % 2 == 0 for v in bits(interior))


@dataclass(frozen=True, eq=False)
class WitnessPlan:
    """Input state and angles under which some branches cannot occur.

    Attributes
    ----------
    graph : OpenGraph
    w0 : int
        The violating set the plan is built from.
    pauli : dict[int, str]
        ``"X"`` or ``"Y"`` for each vertex of ``w0``; vertices not listed
        carry the identity.
    input_state_spec : dict[int, str]
        One of ``plus``, ``minus``, ``zero``, ``one`` per input vertex.
    angles : dict[int, float]
        Measurement angle of every measured vertex.
    forbidden_parity : int
        Branches whose outcomes on ``w0`` sum to this parity have
        probability 0.
    """

    graph: OpenGraph
    w0: int
    pauli: dict[int, str]
    input_state_spec: dict[int, str]
    angles: dict[int, float]
    forbidden_parity: int

    def input_state(self) -> np.ndarray:
        return sim.product_state([self.input_state_spec[v] for v in bits(self.graph.inputs)])

    def measurement_plan(self) -> sim.MeasurementPlan:
        return sim.MeasurementPlan.uncorrected(self.graph, self.angles)

    def branch_probabilities(self) -> np.ndarray:
        """Simulated probability of every branch under this plan."""
        table = sim.run_branches(self.graph, self.measurement_plan())
        return table.probabilities(self.input_state())

    def forbidden_mask(self) -> np.ndarray:
        """Boolean array over branches: does the branch have the forbidden parity?"""
        measured = list(bits(self.graph.non_outputs))
        k = len(measured)
        s = np.arange(1 << k)
        parity = np.zeros(1 << k, dtype=np.int64)
        for i, v in enumerate(measured):
            if (self.w0 >> v) & 1:
                parity ^= (s >> (k - 1 - i)) & 1
        return parity == self.forbidden_parity

    def forbidden_probability(self) -> float:
        """Largest simulated probability among the forbidden branches."""
        return float(np.max(self.branch_probabilities()[self.forbidden_mask()]))

    def to_dict(self) -> dict:
        lab = self.graph.labels
        return {
            "w0": self.graph.names(self.w0),
            "pauli": {lab[v]: p for v, p in sorted(self.pauli.items())},
            "input_state": {lab[v]: s for v, s in sorted(self.input_state_spec.items())},
            "angles": {lab[v]: a for v, a in sorted(self.angles.items())},
            "forbidden_parity": self.forbidden_parity,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _is_internal(og: OpenGraph, w: int) -> bool:
    return bool(w) and not w & og.outputs and not og.odd(w) & ~(w | og.inputs)


def _stabiliser_parity(og: OpenGraph, w0: int) -> int:
    """Outcome parity on ``w0`` that the plan's Pauli measurement must produce.

    The graph-state stabiliser over ``w0`` carries a sign for every edge
    inside ``w0``, and rewriting each ``XZ`` as ``Y`` contributes a factor
    ``-i``; the number of such vertices is always even.
    """
    overlap = (w0 & og.odd(w0)).bit_count()
    return (og.edges_within(w0) + overlap // 2) % 2


def make_witness(og: OpenGraph, w0: int) -> WitnessPlan:
    """Measurement settings that rule out half of the branches.

    Vertices of ``w0`` outside ``Odd(w0)`` are measured in the X basis and
    those inside in the Y basis; inputs in ``w0`` start in ``|+>`` and the
    remaining inputs in ``|0>``.

    Raises
    ------
    GraphError
        If ``w0`` is not an internal set of ``og``.
    """
    if not _is_internal(og, w0):
        raise GraphError(f"{og.names(w0)} is not an internal set")
    odd = og.odd(w0)
    pauli = {v: ("Y" if (odd >> v) & 1 else "X") for v in bits(w0)}
    angles = {u: (math.pi / 2 if pauli.get(u) == "Y" else 0.0) for u in bits(og.non_outputs)}
    spec = {v: ("plus" if (w0 >> v) & 1 else "zero") for v in bits(og.inputs)}
    return WitnessPlan(og, w0, pauli, spec, angles, 1 ^ _stabiliser_parity(og, w0))


def make_distinguishing_witness(og: OpenGraph, w0: int) -> tuple[WitnessPlan, WitnessPlan]:
    """Two input states whose forbidden branches differ.

    The plans share the angles of :func:`make_witness` and differ only on
    the least-index input ``u0`` of ``w0 | Odd(w0)``.  If ``u0`` lies in
    ``w0`` it is prepared in ``|+>`` or ``|->``, otherwise in ``|0>`` or
    ``|1>``; either way the forbidden parity flips between the two plans.

    Raises
    ------
    GraphError
        If ``w0`` is not strongly internal.
    """
    touched = og.local_set(w0) & og.inputs
    if not _is_internal(og, w0) or not touched:
        raise GraphError(f"{og.names(w0)} is not a strongly internal set")
    base = make_witness(og, w0)
    u0 = (touched & -touched).bit_length() - 1
    pair = ("plus", "minus") if (w0 >> u0) & 1 else ("zero", "one")
    plans = []
    for a, state in enumerate(pair):
        spec = dict(base.input_state_spec)
        spec[u0] = state
        plans.append(
            WitnessPlan(og, w0, base.pauli, spec, base.angles, base.forbidden_parity ^ a)
        )
    return plans[0], plans[1]


def distinguishing_gap(plans: tuple[WitnessPlan, WitnessPlan]) -> float:
    """Largest per-branch probability difference between the two plans."""
    p0, p1 = (p.branch_probabilities() for p in plans)
    return float(np.max(np.abs(p0 - p1)))
