"""Error norms, convergence rates and penalty diagnostics"""

from analyzers.error_analyzer import (ErrorAnalyzer, ErrorReport, convergence_rate, discrete_energy_norm,
                                      error_report)
from analyzers.penalty_analyzer import PenaltyDiagnostics, dof_count, inf_sup_constant, penalty_diagnostics

__all__ = [
    'ErrorAnalyzer', 'ErrorReport', 'convergence_rate', 'discrete_energy_norm', 'error_report',
    'PenaltyDiagnostics', 'dof_count', 'inf_sup_constant', 'penalty_diagnostics',
]
