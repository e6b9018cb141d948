"""Turning a violating vertex set into a concrete experiment.

An internal set yields Pauli measurement settings under which half of the
branches never occur.  A strongly internal set yields two input states that
the branch statistics can tell apart, so the probabilities depend on the
input.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from gflowkit import OpenGraph, classify, load, sim

graphs = Path(__file__).parent / "graphs"

og = load(graphs / "triangle.txt")
w0 = classify.internal_sets(og)[0]
plan = classify.make_witness(og, w0)
print("triangle, internal set", og.names(w0))
print("  settings:", plan.to_dict())
probs = plan.branch_probabilities()
mask = plan.forbidden_mask()
for s, (p, forbidden) in enumerate(zip(probs, mask)):
    print(f"  branch {sim.branch_label(og, s)}: p={p:.3f}{'  (forbidden)' if forbidden else ''}")

# v1 is an input adjacent to v2; {v2} is internal and touches the input.
og = OpenGraph.from_edges(["v1", "v2", "v3"], [("v1", "v2")], ["v1"], ["v3"])
w0 = classify.strongly_internal_sets(og)[0]
a, b = classify.make_distinguishing_witness(og, w0)
print("\npendant pair with input v1, strongly internal set", og.names(w0))
for plan in (a, b):
    p = plan.branch_probabilities()
    print(f"  input {plan.to_dict()['input_state']}: branch probabilities {np.round(p, 3)}")
print(f"  largest gap: {classify.distinguishing_gap((a, b)):.3f}")
