from __future__ import annotations

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import six_vertex, open_graphs, path
from gflowkit import census, flow, sim
from gflowkit.flow import FlowError, GFlow
from gflowkit.opengraph import CapExceeded, OpenGraph, bits
from gflowkit.sim import MeasurementPlan, PlanError
import oracles

H = np.array([[1, 1], [1, -1]]) / math.sqrt(2)


def test_prepare_identity_when_everything_is_input():
    og = OpenGraph.from_edges(2, [], [0, 1], [])
    assert np.allclose(sim.preparation_map(og), np.eye(4))


def test_prepare_single_plus():
    og = OpenGraph.from_edges(1, [])
    assert np.allclose(sim.prepare(og, np.array([1.0])), [1 / math.sqrt(2)] * 2)


def test_prepare_path_by_hand():
    og = path(2)
    s = 1 / math.sqrt(2)
    assert np.allclose(sim.prepare(og, np.array([1, 0])), [s, s, 0, 0])
    assert np.allclose(sim.prepare(og, np.array([0, 1])), [0, 0, s, -s])


def test_prepare_rejects_wrong_dimension():
    with pytest.raises(ValueError):
        sim.prepare(path(2), np.ones(4))


def test_prepare_matches_formula_exhaustive():
    for og in census.open_graphs(4):
        assert np.allclose(sim.preparation_map(og), oracles.preparation_by_formula(og))


def test_path_teleports_hadamard():
    og = path(2)
    plan = MeasurementPlan((0,), {0: 0.0}, {0: 0b10}, {})
    t = sim.run_branches(og, plan)
    for s in range(2):
        assert np.allclose(t.maps[s], H / math.sqrt(2))
    assert np.allclose(t.probabilities(np.array([0.6, 0.8])), [0.5, 0.5])


def test_nothing_measured_gives_single_branch():
    og = OpenGraph.from_edges(3, [(0, 1), (1, 2)], [0], [0, 1, 2])
    t = sim.run_branches(og, MeasurementPlan(()))
    assert t.maps.shape[0] == 1
    assert np.allclose(t.maps[0], sim.preparation_map(og))
    assert np.allclose(t.probabilities(np.array([0.6, 0.8])), [1.0])


def test_six_vertex_graph_uncorrected_is_uniform():
    og = six_vertex()
    rng = np.random.default_rng(7)
    plan = MeasurementPlan.uncorrected(og, sim.random_angles(og, rng))
    probs = sim.run_branches(og, plan).probabilities(sim.random_states(2, 5, rng))
    assert probs.shape == (16, 5)
    assert np.allclose(probs, 1 / 16, atol=1e-9)


def test_branch_index_convention():
    og = OpenGraph.from_edges(3, [], [], [2])
    t = sim.run_branches(og, MeasurementPlan((1, 0), {0: 0.0, 1: math.pi}))
    # vertex v1 is the high bit of the branch index whatever the order
    assert t.outcome(0b10) == {0: 1, 1: 0}
    probs = t.probabilities(np.array([1.0]))
    # v1 at angle 0 always reads 0, v2 at angle pi always reads 1
    assert probs[0b01] == pytest.approx(1.0) and probs[0b00] == pytest.approx(0.0, abs=1e-12)


def _random_extensive_plan(og: OpenGraph, rng) -> MeasurementPlan:
    order = tuple(int(v) for v in rng.permutation(list(bits(og.non_outputs))))
    done = 0
    x, z = {}, {}
    for u in order:
        done |= 1 << u
        later = og.full & ~done
        x[u] = int(rng.integers(0, 1 << og.n)) & later
        z[u] = int(rng.integers(0, 1 << og.n)) & later
    return MeasurementPlan(order, sim.random_angles(og, rng), x, z)


def test_scheduled_corrections_match_product_form():
    rng = np.random.default_rng(3)
    for og in census.open_graphs(4):
        if not og.non_outputs:
            continue
        plan = _random_extensive_plan(og, rng)
        t = sim.run_branches(og, plan)
        for s in range(t.maps.shape[0]):
            assert np.allclose(t.maps[s], sim.branch_map(og, plan, t.outcome(s)))


@settings(max_examples=60, deadline=None)
@given(open_graphs(max_n=6), st.integers(0, 2**32 - 1))
def test_completeness(og, seed):
    plan = _random_extensive_plan(og, np.random.default_rng(seed))
    assert sim.run_branches(og, plan).completeness_residual() <= 1e-9


def test_corrections_from_gflow_path():
    og = path(2)
    plan = sim.corrections_from_gflow(og, flow.find_gflow(og))
    assert plan.x == {0: 0b10} and plan.z == {0: 0}
    assert plan.order == (0,)


def test_corrections_from_chain_gflow():
    og = path(4)
    chain = GFlow(og, {0: 0b0010, 1: 0b0100, 2: 0b1000}, {0: 3, 1: 2, 2: 1, 3: 0})
    plan = sim.corrections_from_gflow(og, chain)
    assert plan.x == {0: 0b0010, 1: 0b0100, 2: 0b1000}
    assert plan.z == {0: 0b0100, 1: 0b1000, 2: 0}
    assert plan.order == (0, 1, 2)


def test_corrections_from_invalid_gflow():
    og = path(2)
    with pytest.raises(FlowError):
        sim.corrections_from_gflow(og, GFlow(og, {0: 0}, {0: 1, 1: 0}))


def test_strong_determinism_examples():
    og = OpenGraph.from_edges(2, [(0, 1)], [0], [0, 1])
    ok, residual = sim.check_strong_determinism(sim.run_branches(og, MeasurementPlan(())))
    assert ok and residual == 0
    og = path(2)
    plan = sim.corrections_from_gflow(og, flow.find_gflow(og))
    assert sim.check_strong_determinism(sim.run_branches(og, plan))[0]


def test_zeroed_corrections_break_determinism():
    og = path(3)
    rng = np.random.default_rng(11)
    plan = sim.corrections_from_gflow(og, flow.find_gflow(og)).with_angles(sim.random_angles(og, rng))
    ok, residual = sim.check_strong_determinism(sim.run_branches(og, plan.without_corrections()))
    assert not ok and residual > 0.1


def _edge_sign(og: OpenGraph, f, s_bits: dict[int, int]) -> int:
    return (-1) ** sum(og.edges_within(f.g[u]) for u, b in s_bits.items() if b)


def test_gflow_branches_differ_only_by_edge_sign():
    """Standard corrections reproduce chi_0 up to (-1)^(edges inside g(u)) per outcome 1."""
    rng = np.random.default_rng(5)
    for og in census.open_graphs(5):
        f = flow.find_gflow(og)
        if f is None or not og.non_outputs:
            continue
        ff = flow.focus(og, f)
        plan = sim.corrections_from_gflow(og, ff).with_angles(sim.random_angles(og, rng))
        t = sim.run_branches(og, plan)
        for s in range(t.maps.shape[0]):
            assert np.allclose(t.maps[s], _edge_sign(og, ff, t.outcome(s)) * t.maps[0], atol=1e-9)
        assert sim.check_strong_determinism(t, allow_sign=True)[0]
        even = all(og.edges_within(k) % 2 == 0 for k in ff.g.values())
        assert sim.check_strong_determinism(t)[0] == even


def test_gflow_plans_are_uniform():
    rng = np.random.default_rng(9)
    for og in census.open_graphs(4):
        f = flow.find_gflow(og)
        if f is None:
            continue
        plan = sim.corrections_from_gflow(og, f).with_angles(sim.random_angles(og, rng))
        probs = sim.run_branches(og, plan).probabilities(sim.random_states(1 << og.inputs.bit_count(), 4, rng))
        assert np.allclose(probs, 2.0 ** -og.non_outputs.bit_count(), atol=1e-9)


def test_output_only_corrections_keep_probabilities():
    rng = np.random.default_rng(13)
    for og in census.open_graphs(4):
        if not og.non_outputs or not og.outputs:
            continue
        plan = _random_extensive_plan(og, rng)
        plan = MeasurementPlan(
            plan.order,
            plan.angles,
            {u: k & og.outputs for u, k in plan.x.items()},
            {u: k & og.outputs for u, k in plan.z.items()},
        )
        states = sim.random_states(1 << og.inputs.bit_count(), 3, rng)
        with_c = sim.run_branches(og, plan).probabilities(states)
        without = sim.run_branches(og, plan.without_corrections()).probabilities(states)
        assert np.allclose(with_c, without, atol=1e-12)


def test_corrections_on_measured_qubits_change_probabilities():
    og = OpenGraph.from_edges(2, [])
    plan = MeasurementPlan((0, 1), {0: math.pi / 2}, {}, {0: 0b10})
    with_c = sim.run_branches(og, plan).probabilities(np.array([1.0]))
    without = sim.run_branches(og, plan.without_corrections()).probabilities(np.array([1.0]))
    assert without[0b10] == pytest.approx(0.5) and with_c[0b10] == pytest.approx(0.0, abs=1e-12)


def test_equiprobability_examples():
    assert sim.check_equiprobability(six_vertex(), trials=20, tol=1e-9)
    assert not sim.check_equiprobability(OpenGraph.from_edges(1, []), trials=5)
    assert sim.check_equiprobability(OpenGraph.from_edges(2, [(0, 1)], [0], [0, 1]))


def test_constant_probability_examples():
    assert sim.check_constant_probability(six_vertex(), trials=10)
    iso_input = OpenGraph.from_edges(1, [], [0], [])
    assert not sim.check_constant_probability(iso_input, trials=10)
    no_inputs = OpenGraph.from_edges(1, [])
    assert sim.check_constant_probability(no_inputs, trials=10)
    assert not sim.check_equiprobability(no_inputs, trials=10)


def test_plan_validation():
    og = path(3)
    with pytest.raises(PlanError):
        MeasurementPlan((0,)).validate(og)
    with pytest.raises(PlanError):
        MeasurementPlan((0, 1), x={1: 0b001}).validate(og)
    with pytest.raises(PlanError):
        MeasurementPlan((0, 1), angles={2: 0.1}).validate(og)


def test_plan_json_round_trip():
    og = path(3)
    plan = MeasurementPlan((0, 1), {0: 0.25, 1: 1.5}, {0: 0b010, 1: 0b100}, {0: 0b100})
    data = json.loads(plan.to_json(og))
    assert data == {
        "angles": {"v1": 0.25, "v2": 1.5},
        "x": {"v1": ["v2"], "v2": ["v3"]},
        "z": {"v1": ["v3"]},
        "order": ["v1", "v2"],
    }
    back = MeasurementPlan.from_dict(og, data)
    assert (back.order, back.angles, back.x, back.z) == (plan.order, plan.angles, plan.x, plan.z)


def test_branch_table_json():
    og = path(2)
    t = sim.run_branches(og, sim.corrections_from_gflow(og, flow.find_gflow(og)))
    data = t.to_dict(np.array([1.0, 0.0]), include_maps=True)
    assert [b["outcome"] for b in data["branches"]] == ["0", "1"]
    assert data["branches"][0]["probability"] == pytest.approx(0.5)
    assert data["branches"][0]["shape"] == [2, 2]
    assert "map" not in t.to_dict()["branches"][0]


def test_simulation_size_cap():
    og = OpenGraph.from_edges(sim.MAX_QUBITS + 1, [])
    with pytest.raises(CapExceeded):
        sim.preparation_map(og)


def test_product_state():
    assert np.allclose(sim.product_state(["zero", "one"]), [0, 1, 0, 0])
    assert np.allclose(sim.product_state(["minus"]), [1 / math.sqrt(2), -1 / math.sqrt(2)])
    assert np.allclose(sim.product_state([]), [1])
