"""Where to put inputs and outputs on a 2x3 grid.

One input and one output never suffice.  With two of each, every placement
that makes the branches equiprobable also carries a gflow.
"""

from __future__ import annotations

from pathlib import Path

from gflowkit import chooser, load

og = load(Path(__file__).parent / "graphs" / "grid2x3.txt")
print(f"automorphisms of the grid: {len(chooser.automorphisms(og))}")

base = chooser.violating_collection(og, 0)
print(f"sets every input choice must hit: {len(base)}")
print("smallest input sets:", [og.names(t) for t in chooser.minimal_transversals(base, 2)])

print(f"\nk=1 placements: {len(chooser.choose_io(og, 1))}")
placements = chooser.choose_io(og, 2)
print(f"k=2 placements: {len(placements)}, all with gflow: {all(p.has_gflow for p in placements)}")

reps = chooser.dedupe_by_symmetry(og, placements)
print(f"\none placement per symmetry orbit ({len(reps)}):")
for p in reps:
    shared = " (shared vertex)" if p.inputs & p.outputs else ""
    print(f"  I={og.names(p.inputs)}  O={og.names(p.outputs)}{shared}")

autos = chooser.automorphisms(og)
inputs = sorted({min(chooser._permute(p.inputs, a) for a in autos) for p in placements})
print(f"\ninput sets up to symmetry ({len(inputs)}):", [og.names(i) for i in inputs])
