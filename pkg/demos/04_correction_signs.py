"""Gflow corrections fix each branch only up to a sign.

Applying X on ``g(u)`` and Z on ``Odd(g(u)) - {u}`` after outcome 1 on
``u`` brings every branch back to the zero branch times
``(-1)^(edges inside g(u))``.  When a correction set spans an odd number of
edges the branches differ by a global sign: physically harmless, but no
longer literally equal as matrices.
"""

from __future__ import annotations

import numpy as np

from gflowkit import OpenGraph, flow, sim

# Every gflow of this graph has some correction set with an odd edge count.
og = OpenGraph.from_edges(5, [(0, 1), (0, 4), (1, 2), (1, 3), (1, 4), (2, 3), (3, 4)], [], [1, 3])
f = flow.focus(og, flow.find_gflow(og))
for u, k in sorted(f.g.items()):
    print(f"g({og.labels[u]}) = {og.names(k)}  edges inside: {og.edges_within(k)}")

rng = np.random.default_rng(4)
plan = sim.corrections_from_gflow(og, f).with_angles(sim.random_angles(og, rng))
table = sim.run_branches(og, plan)
chi0 = table.maps[0]
print("\nbranch   ||chi_s - chi_0||   ||chi_s + chi_0||")
for s in range(table.maps.shape[0]):
    minus = np.linalg.norm(table.maps[s] - chi0)
    plus = np.linalg.norm(table.maps[s] + chi0)
    print(f"{sim.branch_label(og, s):>6}   {minus:16.3f}   {plus:16.3f}")

print("\nstrict:", sim.check_strong_determinism(table))
print("up to sign:", sim.check_strong_determinism(table, allow_sign=True))
