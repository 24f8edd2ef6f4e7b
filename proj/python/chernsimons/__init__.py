"""Chern-Simons invariants, flat connections and prequantum lines."""

from ._core import (
    CsError,
    catalog,
    cs_action,
    exp_map,
    gauge_defect,
    heisenberg_alpha,
    heisenberg_holonomy,
    run_config,
    run_experiment,
    search_flat,
    structure_constants,
)


def error_kind(err: CsError) -> str:
    """Kind name of a library error, e.g. "ConfigInvalid"."""
    return err.args[1]


__all__ = [
    "CsError",
    "catalog",
    "cs_action",
    "error_kind",
    "exp_map",
    "gauge_defect",
    "heisenberg_alpha",
    "heisenberg_holonomy",
    "run_config",
    "run_experiment",
    "search_flat",
    "structure_constants",
]
