"""Adaptive consensus protocols for multi-agent networks."""

from ._core import (
    ConfigError,
    ConsensusGain,
    DivergenceError,
    LinearModel,
    LipschitzGain,
    NonlinearModel,
    NumericalError,
    SimConfig,
    SynthesisError,
    Topology,
    TopologyError,
    Trajectory,
    Verdict,
    benchmark_topology,
    check_lipschitz,
    check_stabilizable,
    complete_topology,
    consensus_error,
    gamma_consistency,
    laplacian,
    manipulator_model,
    path_topology,
    ring_topology,
    run_cli,
    simulate_adaptive,
    simulate_leader,
    simulate_static,
    solve_care,
    solve_linear_gain,
    solve_lipschitz_gain,
    spectrum,
    star_topology,
    static_coupling_bound,
    verdict,
    verify_consensus_gain,
    verify_lipschitz_gain,
)

__all__ = [name for name in dir() if not name.startswith("_")]
