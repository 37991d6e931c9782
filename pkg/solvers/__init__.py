"""Penalty weights, system assembly and saddle-point solvers"""

from solvers.assembler import (AssembledSystem, assemble, assemble_operators, assemble_wbcr,
                               assemble_wopsip, pressure_mean_vector)
from solvers.exceptions import NonConvergenceError, SingularSystemError, SolverError
from solvers.linsolve import SolveMethod, SolveOptions, SolveResult, direct_oracle, solve_saddle
from solvers.penalty import PenaltyMode, penalty_kappa, penalty_weights

__all__ = [
    'AssembledSystem', 'assemble', 'assemble_operators', 'assemble_wbcr', 'assemble_wopsip',
    'pressure_mean_vector', 'NonConvergenceError', 'SingularSystemError', 'SolverError',
    'SolveMethod', 'SolveOptions', 'SolveResult', 'direct_oracle', 'solve_saddle',
    'PenaltyMode', 'penalty_kappa', 'penalty_weights',
]
