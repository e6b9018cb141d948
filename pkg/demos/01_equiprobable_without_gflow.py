"""An open graph whose branches are all equally likely but which has no gflow.

Run with ``python3 demos/01_equiprobable_without_gflow.py``.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from gflowkit import classify, load, sim

og = load(Path(__file__).parent / "graphs" / "equi_no_gflow.txt")
print(og.dumps())

report = classify.classify(og)
print(f"gflow: {report.has_gflow}")
print(f"internal sets: {report.internal_sets}  (none, so every branch is equally likely)")

# Without any corrections, sample random angles and random input states
# and look at the spread of the 16 branch probabilities.
rng = np.random.default_rng(0)
spread = []
for _ in range(20):
    plan = sim.MeasurementPlan.uncorrected(og, sim.random_angles(og, rng))
    probs = sim.run_branches(og, plan).probabilities(sim.random_states(2, 20, rng))
    spread.append(float(np.max(np.abs(probs - 1 / 16))))
print(f"largest deviation from 1/16 over 400 samples: {max(spread):.2e}")

# Removing an output breaks the property and the classifier names the culprit.
smaller = og.with_io(og.inputs, og.mask(["v6"]))
r = classify.classify(smaller)
print(f"\nwith outputs {{v6}} only: equiprobable={r.equiprobable}")
w0 = r.internal_sets[0]
witness = classify.make_witness(smaller, w0)
print(f"internal set {smaller.names(w0)}; Pauli settings {witness.to_dict()['pauli']}")
print(f"largest probability of a forbidden branch: {witness.forbidden_probability():.1e}")
