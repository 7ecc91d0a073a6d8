"""Simulation laboratory for probabilistic zero forcing on graphs.

The heavy lifting lives in the compiled extension; this package re-exports it
and adds small conveniences on the exact-arithmetic results, which cross the
boundary as strings to stay lossless.
"""

from fractions import Fraction

from ._core import run_trials as _run_trials
from ._core import (
    ENGINE_VERSION,
    Graph,
    chernoff_tail,
    check_expansion,
    coupled_run_subset,
    derive_seed,
    estimate_force_event_probability,
    eta_sequence,
    expected_propagation_time,
    is_connected,
    min_expected_propagation_time,
    named_graph,
    phase_thresholds,
    predict_bounds,
    read_edge_list_file,
    run_process,
    run_with_shadow,
    sample_gnp,
    transition_distribution,
    write_edge_list_file,
)

__all__ = [
    "ENGINE_VERSION",
    "Graph",
    "chernoff_tail",
    "check_expansion",
    "coupled_run_subset",
    "derive_seed",
    "estimate_force_event_probability",
    "eta_sequence",
    "exact_propagation_time",
    "exact_min_propagation_time",
    "expected_propagation_time",
    "is_connected",
    "min_expected_propagation_time",
    "named_graph",
    "phase_thresholds",
    "predict_bounds",
    "read_edge_list_file",
    "run_process",
    "run_trials",
    "run_with_shadow",
    "sample_gnp",
    "transition_distribution",
    "write_edge_list_file",
]


def exact_propagation_time(g, start, cap=12):
    """Expected propagation time from `start`, as an exact Fraction.

    `start` may be any iterable of vertex indices.
    """
    return Fraction(expected_propagation_time(g, sorted(start), cap))


def exact_min_propagation_time(g, cap=12):
    """(minimizing vertex, exact Fraction) over all singleton starts."""
    vertex, value = min_expected_propagation_time(g, cap)
    return vertex, Fraction(value)


def run_trials(family, n, p=float("nan"), start=(0,), min_singleton=False,
               trials=100, master_seed=1, workers=1, keep_records=False):
    """Monte Carlo trials on a named family; `start` takes a vertex or an
    iterable of vertices, matching the config-file schema."""
    if isinstance(start, int):
        start = [start]
    return _run_trials(family, n, p, sorted(start), min_singleton,
                       trials, master_seed, workers, keep_records)
