"""Barenco two-qubit gates from a tunable non-collinear interaction:
closed-form synthesis, pulse-level simulation, error budgets, inverse design.
"""

from .atoms import (BlockadeSpec, NoncollinearV, RotatedBasis, VdwSpec, b02_tuned,
                    blockade_from_c6, load_interaction_config, noncollinear_from_blockade)
from .design import (DesignSolution, RationalityReport, rationality_diagnostic,
                     solve_protocol1, solve_protocol2)
from .dynamics import (DecaySpec, PulseSegment, SimConfig, SimResult, build_hamiltonian,
                       build_sequence, simulate)
from .errors import (ErrorBudget, ForceDrift, MCResult, TrapSigmas, TrapSpec,
                     blockade_error, decay_error, force_drift, leakage_error,
                     mc_position_error, total_budget, trap_sigmas)
from .exceptions import ContractViolationError, InfeasibleGateError
from .numerics import SpectralData, avg_gate_fidelity, eig2, eig2_from_elements, propagate
from .protocols import (ExtractedAngles, GateAngles, Protocol1Angles, Protocol2Angles,
                        ProtocolParams, barenco_matrix, cnot_matrix, compose_ideal,
                        controlled_y_matrix, extract_angles, params_from_blockade,
                        protocol1_angles, protocol2_angles, special_gate)

__version__ = "0.1.0"

__all__ = [
    "BlockadeSpec", "NoncollinearV", "RotatedBasis", "VdwSpec",
    "b02_tuned", "blockade_from_c6", "load_interaction_config", "noncollinear_from_blockade",
    "DesignSolution", "RationalityReport", "rationality_diagnostic",
    "solve_protocol1", "solve_protocol2",
    "DecaySpec", "PulseSegment", "SimConfig", "SimResult",
    "build_hamiltonian", "build_sequence", "simulate",
    "ErrorBudget", "ForceDrift", "MCResult", "TrapSigmas", "TrapSpec",
    "blockade_error", "decay_error", "force_drift", "leakage_error",
    "mc_position_error", "total_budget", "trap_sigmas",
    "ContractViolationError", "InfeasibleGateError",
    "SpectralData", "avg_gate_fidelity", "eig2", "eig2_from_elements", "propagate",
    "ExtractedAngles", "GateAngles", "Protocol1Angles", "Protocol2Angles", "ProtocolParams",
    "barenco_matrix", "cnot_matrix", "compose_ideal", "controlled_y_matrix",
    "extract_angles", "params_from_blockade", "protocol1_angles", "protocol2_angles",
    "special_gate",
]
