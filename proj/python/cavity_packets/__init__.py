"""Strongly driven Jaynes-Cummings simulator and analytics (units hbar = g = 1)."""

from ._core import (
    BranchFrequency,
    CdsReport,
    ConfigError,
    Error,
    GridTooSmall,
    LdsReport,
    NoConvergence,
    NonuniformGrid,
    PoleAtTwoF,
    PositivityViolation,
    StepUnstable,
    SystemParams,
    TimeGrid,
    TruncationError,
    TruncationOverflow,
    UnstableBranch,
    cds_report,
    chain_eigensolve,
    classify_region,
    coherent_state,
    detect_packets,
    evolve_lindblad,
    evolve_schrodinger,
    find_stationary,
    hamiltonian,
    lds_mean_photon,
    lds_report,
    lds_trajectory,
    lindblad_rhs,
    photon_distribution,
    photon_distribution_rho,
    prepare_state,
    reduce_photonic,
    run,
    spectrum,
    wigner,
)

__version__ = "0.1.0"


def run_config(config, threads=1):
    """Run a configuration mapping; values may be numbers, bools or strings."""
    flat = {}
    for key, value in config.items():
        if isinstance(value, bool):
            flat[key] = "true" if value else "false"
        else:
            flat[key] = str(value)
    return run(flat, threads)
