"""Hierarchical many-core barrier simulator.

Thin re-export of the compiled extension; see the module docstrings on the
functions themselves for argument details.
"""

from ._tilesim import (
    SimError,
    Topology,
    build_topology,
    plan_summary,
    reference_fft,
    run_delay,
    run_experiment,
    run_kernel,
    run_ofdm,
    validate_config,
)

__all__ = [
    "SimError",
    "Topology",
    "build_topology",
    "plan_summary",
    "reference_fft",
    "run_delay",
    "run_experiment",
    "run_kernel",
    "run_ofdm",
    "validate_config",
]
