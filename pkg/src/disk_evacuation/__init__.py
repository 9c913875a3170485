"""Two-robot evacuation of the unit disk when robots talk only face to face."""

from .costmodel import EvacuationOutcome, WorstCaseReport, cost_A, cost_C, worst_case
from .geometry import DomainError, Point
from .hexagon import (
    ExploredSet,
    HexAlgorithm,
    adversary,
    disk_lower_bound_constant,
    evaluate_hex,
    find_unexplored_hexagon,
    hex_optimal_algorithm,
)
from .optimizer import SearchSpec, equalization_report, optimize
from .simulator import SimConfig, simulate, validate_symmetry
from .solvers import (
    InfeasibleParametersError,
    ParameterError,
    critical_arc,
    eval_h,
    eval_h_prime,
    solve_f,
    solve_p,
    solve_psi,
)
from .trajectories import REFERENCE_B_CHI, REFERENCE_C, Algo, AlgorithmParams, build_R1, build_R2

__all__ = [
    "Algo",
    "AlgorithmParams",
    "DomainError",
    "EvacuationOutcome",
    "ExploredSet",
    "HexAlgorithm",
    "InfeasibleParametersError",
    "ParameterError",
    "Point",
    "REFERENCE_B_CHI",
    "REFERENCE_C",
    "SearchSpec",
    "SimConfig",
    "WorstCaseReport",
    "adversary",
    "build_R1",
    "build_R2",
    "cost_A",
    "cost_C",
    "critical_arc",
    "disk_lower_bound_constant",
    "equalization_report",
    "eval_h",
    "eval_h_prime",
    "evaluate_hex",
    "find_unexplored_hexagon",
    "hex_optimal_algorithm",
    "optimize",
    "simulate",
    "solve_f",
    "solve_p",
    "solve_psi",
    "validate_symmetry",
    "worst_case",
]
