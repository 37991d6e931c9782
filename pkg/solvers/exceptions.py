class SolverError(RuntimeError):
    """Base class for saddle-point solver failures"""


class NonConvergenceError(SolverError):
    """Iteration budget exhausted before reaching the requested tolerance"""

    def __init__(self, residual: float, iterations: int, n: int = None):
        self.residual = residual
        self.iterations = iterations
        self.n = n
        where = f" at N={n}" if n is not None else ""
        super().__init__(
            f"Solver did not converge{where}: best relative residual {residual:.3e} "
            f"after {iterations} iterations"
        )

    def at(self, n: int) -> 'NonConvergenceError':
        """Copy of this error tagged with the division count of the failing run"""
        return NonConvergenceError(self.residual, self.iterations, n)


class SingularSystemError(SolverError):
    """Factorization broke down on a singular or numerically singular system"""
