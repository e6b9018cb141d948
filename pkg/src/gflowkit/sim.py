"""Exact branch-by-branch state-vector simulation of measurement patterns.

Conventions
-----------
* Basis states are ordered by vertex index with the first vertex as the most
  significant bit.  Input states live on the inputs in ascending order and
  branch maps act ``C^(2^|I|) -> C^(2^|O|)``.
* Measuring ``u`` at angle ``a`` projects onto ``<+_a| = (<0| + e^{-ia}<1|)/sqrt2``
  for outcome 0 and onto ``<+_{a+pi}|`` for outcome 1.
* After each measurement with outcome 1, ``X_{x(u)} Z_{z(u)}`` is applied
  (``Z`` first) to the qubits that are still unmeasured.
* Branch ``s`` is indexed by the outcomes of the measured vertices in
  ascending vertex order, first measured-set vertex most significant.
"""

from __future__ import annotations

import json
from collections.abc import Iterator
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from .flow import FlowError, FocusedGFlow, GFlow, verify_gflow
from .opengraph import CapExceeded, OpenGraph, bits

#: Dense simulation refuses graphs larger than this.
MAX_QUBITS = 20

_SQRT1_2 = 1 / np.sqrt(2)


class PlanError(ValueError):
    """Measurement plan inconsistent with its graph."""


@dataclass(frozen=True, eq=False)
class MeasurementPlan:
    """Angles, corrective maps and measurement order for the measured vertices.

    ``x`` and ``z`` map a measured vertex to a bit mask of the qubits that are
    corrected when its outcome is 1.  Missing entries mean "no correction" and
    missing angles mean 0.
    """

    order: tuple[int, ...]
    angles: dict[int, float] = field(default_factory=dict)
    x: dict[int, int] = field(default_factory=dict)
    z: dict[int, int] = field(default_factory=dict)

    @classmethod
    def uncorrected(cls, og: OpenGraph, angles: dict[int, float] | None = None) -> MeasurementPlan:
        """Measure the non-outputs in index order with no corrections."""
        return cls(tuple(bits(og.non_outputs)), dict(angles or {}))

    def with_angles(self, angles: dict[int, float]) -> MeasurementPlan:
        return replace(self, angles=dict(angles))

    def without_corrections(self) -> MeasurementPlan:
        return replace(self, x={}, z={})

    def validate(self, og: OpenGraph) -> None:
        if sorted(self.order) != list(bits(og.non_outputs)):
            raise PlanError("measurement order must list every non-output exactly once")
        measured = 0
        for u in self.order:
            measured |= 1 << u
            targets = self.x.get(u, 0) | self.z.get(u, 0)
            if targets & measured:
                late = og.names(targets & measured)
                raise PlanError(f"corrections of {og.labels[u]} hit already measured {late}")
        extra = (set(self.angles) | set(self.x) | set(self.z)) - set(self.order)
        if extra:
            raise PlanError(f"plan mentions unmeasured vertices {sorted(og.labels[v] for v in extra)}")

    def to_dict(self, og: OpenGraph) -> dict:
        lab = og.labels
        return {
            "angles": {lab[u]: float(self.angles.get(u, 0.0)) for u in self.order},
            "x": {lab[u]: og.names(self.x[u]) for u in self.order if self.x.get(u)},
            "z": {lab[u]: og.names(self.z[u]) for u in self.order if self.z.get(u)},
            "order": [lab[u] for u in self.order],
        }

    @classmethod
    def from_dict(cls, og: OpenGraph, data: dict) -> MeasurementPlan:
        return cls(
            tuple(og.index(v) for v in data["order"]),
            {og.index(v): float(a) for v, a in data.get("angles", {}).items()},
            {og.index(v): og.mask(t) for v, t in data.get("x", {}).items()},
            {og.index(v): og.mask(t) for v, t in data.get("z", {}).items()},
        )

    def to_json(self, og: OpenGraph) -> str:
        return json.dumps(self.to_dict(og))


@dataclass(frozen=True, eq=False)
class BranchTable:
    """Branch maps ``chi_s`` stacked as an array of shape ``(2^k, 2^|O|, 2^|I|)``."""

    graph: OpenGraph
    maps: np.ndarray

    @property
    def measured(self) -> tuple[int, ...]:
        return tuple(bits(self.graph.non_outputs))

    def outcome(self, s: int) -> dict[int, int]:
        """Outcome bits of branch index ``s`` keyed by vertex."""
        return branch_outcome(self.graph, s)

    def probabilities(self, states: np.ndarray) -> np.ndarray:
        """``p_s = ||chi_s phi||^2``; a 2-d ``states`` (columns) gives shape ``(2^k, m)``."""
        out = np.einsum("sij,j...->si...", self.maps, states)
        return np.sum(np.abs(out) ** 2, axis=1)

    def completeness_residual(self) -> float:
        """``max |sum_s chi_s^dag chi_s - I|`` entrywise."""
        gram = np.einsum("sij,sik->jk", self.maps.conj(), self.maps)
        return float(np.max(np.abs(gram - np.eye(gram.shape[0]))))

    def to_dict(self, state: np.ndarray | None = None, include_maps: bool = False) -> dict:
        og = self.graph
        data: dict = {"measured": og.names(og.non_outputs), "branches": []}
        probs = self.probabilities(state) if state is not None else None
        for s in range(self.maps.shape[0]):
            entry: dict = {"outcome": branch_label(og, s)}
            if probs is not None:
                entry["probability"] = float(probs[s])
            if include_maps:
                flat = self.maps[s].ravel()
                entry["map"] = [[float(c.real), float(c.imag)] for c in flat]
                entry["shape"] = list(self.maps[s].shape)
            data["branches"].append(entry)
        return data


def branch_outcome(og: OpenGraph, s: int) -> dict[int, int]:
    """Outcome bits of branch index ``s``, keyed by measured vertex."""
    measured = list(bits(og.non_outputs))
    k = len(measured)
    return {u: (s >> (k - 1 - i)) & 1 for i, u in enumerate(measured)}


def branch_label(og: OpenGraph, s: int) -> str:
    """Branch index ``s`` as an outcome string in ascending vertex order."""
    return "".join(str(b) for b in branch_outcome(og, s).values())


def _check_size(og: OpenGraph) -> None:
    if og.n > MAX_QUBITS:
        raise CapExceeded(f"{og.n} qubits exceeds the dense simulation cap of {MAX_QUBITS}")


@lru_cache(maxsize=4096)
def _preparation(og: OpenGraph) -> np.ndarray:
    _check_size(og)
    n = og.n
    inputs = list(bits(og.inputs))
    z = np.arange(1 << n)
    vbits = [(z >> (n - 1 - v)) & 1 for v in range(n)]
    parity = np.zeros(1 << n, dtype=np.int64)
    for a, b in og.edges():
        parity ^= vbits[a] & vbits[b]
    col = np.zeros(1 << n, dtype=np.int64)
    for v in inputs:
        col = (col << 1) | vbits[v]
    mat = np.zeros((1 << n, 1 << len(inputs)), dtype=complex)
    mat[z, col] = (1 - 2 * parity) / np.sqrt(2.0 ** (n - len(inputs)))
    mat.setflags(write=False)
    return mat


def preparation_map(og: OpenGraph) -> np.ndarray:
    """Matrix of ``N``: input on I, ``|+>`` on I^C, then CZ along every edge."""
    return _preparation(og)


def prepare(og: OpenGraph, input_state: np.ndarray) -> np.ndarray:
    """``N |phi>`` over all vertices."""
    input_state = np.asarray(input_state, dtype=complex)
    if input_state.shape != (1 << og.inputs.bit_count(),):
        raise ValueError(
            f"input state has {input_state.size} amplitudes, expected {1 << og.inputs.bit_count()}"
        )
    return preparation_map(og) @ input_state


def _bra(angle: float) -> np.ndarray:
    ph = np.exp(-1j * angle)
    return np.array([[1, ph], [1, -ph]]) * _SQRT1_2


def run_branches(og: OpenGraph, plan: MeasurementPlan) -> BranchTable:
    """All branch maps, measuring in plan order and correcting after each outcome 1."""
    plan.validate(og)
    n = og.n
    prep = preparation_map(og)
    cols = prep.shape[1]
    psi = prep.reshape((1,) + (2,) * n + (cols,))
    live = list(range(n))
    for u in plan.order:
        ax = 1 + live.index(u)
        psi = np.tensordot(psi, _bra(plan.angles.get(u, 0.0)), axes=([ax], [1]))
        psi = np.moveaxis(psi, -1, 1)
        live.remove(u)
        zt, xt = plan.z.get(u, 0), plan.x.get(u, 0)
        if zt or xt:
            psi = psi.copy()
            one = psi[:, 1]
            for v in bits(zt):
                idx = [slice(None)] * one.ndim
                idx[1 + live.index(v)] = 1
                one[tuple(idx)] *= -1
            for v in bits(xt):
                one = np.flip(one, axis=1 + live.index(v)).copy()
            psi[:, 1] = one
        psi = psi.reshape((-1,) + psi.shape[2:])
    k = len(plan.order)
    out_dim = 1 << len(live)
    psi = psi.reshape((2,) * k + (out_dim, cols))
    # reorder branch bits from measurement order to ascending vertex order
    perm = [plan.order.index(u) for u in sorted(plan.order)]
    psi = np.transpose(psi, perm + [k, k + 1])
    return BranchTable(og, np.ascontiguousarray(psi.reshape(1 << k, out_dim, cols)))


def _pauli_on(state: np.ndarray, n: int, v: int, kind: str) -> np.ndarray:
    t = state.reshape((2,) * n + state.shape[1:])
    if kind == "X":
        t = np.flip(t, axis=v)
    else:
        t = t.copy()
        idx = [slice(None)] * t.ndim
        idx[v] = 1
        t[tuple(idx)] *= -1
    return t.reshape(state.shape)


def branch_map(og: OpenGraph, plan: MeasurementPlan, outcome: dict[int, int]) -> np.ndarray:
    """``chi_s = P_s (prod_u X^{s_u x(u)} Z^{s_u z(u)}) N`` evaluated literally.

    All corrections are applied to ``N`` before any projection, earliest
    measured first; used to cross-check :func:`run_branches`.
    """
    plan.validate(og)
    n = og.n
    state = np.array(preparation_map(og))
    for u in plan.order:
        if outcome.get(u, 0):
            for v in bits(plan.z.get(u, 0)):
                state = _pauli_on(state, n, v, "Z")
            for v in bits(plan.x.get(u, 0)):
                state = _pauli_on(state, n, v, "X")
    t = state.reshape((2,) * n + (state.shape[1],))
    for u in sorted(plan.order, reverse=True):
        vec = _bra(plan.angles.get(u, 0.0))[outcome.get(u, 0)]
        t = np.tensordot(t, vec, axes=([u], [0]))
    return t.reshape(-1, state.shape[1])


def corrections_from_gflow(og: OpenGraph, f: GFlow | FocusedGFlow) -> MeasurementPlan:
    """Corrective maps ``x(u) = g(u)``, ``z(u) = Odd(g(u)) - {u}``; angles all 0.

    Vertices are measured layer by layer from the highest layer down, ties
    broken by index.
    """
    gflow = f.as_gflow() if isinstance(f, FocusedGFlow) else f
    if not verify_gflow(og, gflow):
        raise FlowError("corrections need a valid gflow")
    order = tuple(sorted(gflow.g, key=lambda v: (-gflow.layers[v], v)))
    x = {u: k for u, k in gflow.g.items()}
    z = {u: og.odd(k) & ~(1 << u) for u, k in gflow.g.items()}
    return MeasurementPlan(order, {}, x, z)


def check_strong_determinism(
    table: BranchTable, tol: float = 1e-9, allow_sign: bool = False
) -> tuple[bool, float]:
    """Are all branch maps literally equal (``chi_s = U / sqrt(2^k)``)?

    Returns ``(ok, residual)`` where ``residual = max_s ||chi_s - chi_0||_F``;
    ``ok`` additionally requires ``U`` to be an isometry.  With
    ``allow_sign`` each branch may also equal ``-chi_0``, a global phase that
    Pauli corrections cannot remove.
    """
    maps = table.maps
    dist = np.linalg.norm(maps - maps[0], axis=(1, 2))
    if allow_sign:
        dist = np.minimum(dist, np.linalg.norm(maps + maps[0], axis=(1, 2)))
    residual = float(np.max(dist))
    u = maps[0] * np.sqrt(maps.shape[0])
    iso = float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[1]))))
    return residual <= tol and iso <= tol, residual


def random_states(dim: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` Haar-ish random unit vectors as columns of a ``(dim, count)`` array."""
    v = rng.normal(size=(dim, count)) + 1j * rng.normal(size=(dim, count))
    return v / np.linalg.norm(v, axis=0)


def random_angles(og: OpenGraph, rng: np.random.Generator) -> dict[int, float]:
    return {u: float(a) for u, a in zip(bits(og.non_outputs), rng.uniform(0, 2 * np.pi, og.n))}


def sampled_probabilities(
    og: OpenGraph, trials: int = 20, n_angles: int | None = None, seed: int = 42
) -> Iterator[np.ndarray]:
    """Branch probabilities without corrections, one ``(branches, trials)`` array per angle vector."""
    rng = np.random.default_rng(seed)
    n_angles = trials if n_angles is None else n_angles
    dim = 1 << og.inputs.bit_count()
    for _ in range(n_angles):
        plan = MeasurementPlan.uncorrected(og, random_angles(og, rng))
        states = random_states(dim, trials, rng)
        yield run_branches(og, plan).probabilities(states)


def check_equiprobability(
    og: OpenGraph, trials: int = 20, tol: float = 1e-9, seed: int = 42, n_angles: int | None = None
) -> bool:
    """Every branch has probability ``2^-|O^C|`` for random inputs and angles."""
    target = 2.0 ** -og.non_outputs.bit_count()
    return all(
        np.max(np.abs(p - target)) <= tol for p in sampled_probabilities(og, trials, n_angles, seed)
    )


def check_constant_probability(
    og: OpenGraph, trials: int = 20, tol: float = 1e-6, seed: int = 42, n_angles: int | None = None
) -> bool:
    """Per-branch variance of ``p_s`` over random inputs stays below ``tol``."""
    return all(
        np.max(np.var(p, axis=1)) <= tol for p in sampled_probabilities(og, trials, n_angles, seed)
    )


def product_state(factors: list[str]) -> np.ndarray:
    """Tensor product of named one-qubit states (``zero``, ``one``, ``plus``, ``minus``)."""
    table = {
        "zero": np.array([1, 0], dtype=complex),
        "one": np.array([0, 1], dtype=complex),
        "plus": np.array([1, 1], dtype=complex) * _SQRT1_2,
        "minus": np.array([1, -1], dtype=complex) * _SQRT1_2,
    }
    state = np.ones(1, dtype=complex)
    for name in factors:
        state = np.kron(state, table[name])
    return state
