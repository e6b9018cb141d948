"""Determinism classes of measurement-based quantum computations on open graphs.

Submodules
----------
gf2
    Bit-packed linear algebra over GF(2).
opengraph
    Open graphs, odd neighbourhoods, parsing and export.
flow
    Gflow search, focusing, DAG right inverses and reversal.
classify
    Equiprobability and constant-probability verdicts with witnesses.
chooser
    Input/output placement search on bare graphs.
sim
    Exact branch-by-branch state-vector simulation.
census
    Exhaustive families of small open graphs.
"""

from __future__ import annotations

from .classify import ClassificationReport, internal_sets, strongly_internal_sets
from .flow import Dag, FocusedGFlow, GFlow, find_gflow, focus, verify_gflow
from .gf2 import BitMatrix
from .opengraph import OpenGraph, load, parse
from .sim import BranchTable, MeasurementPlan, run_branches

__all__ = [
    "BitMatrix",
    "BranchTable",
    "ClassificationReport",
    "Dag",
    "FocusedGFlow",
    "GFlow",
    "MeasurementPlan",
    "OpenGraph",
    "find_gflow",
    "focus",
    "internal_sets",
    "load",
    "parse",
    "run_branches",
    "strongly_internal_sets",
    "verify_gflow",
]
