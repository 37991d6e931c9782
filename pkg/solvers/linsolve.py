import logging
import time
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Optional

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.linalg import MatrixRankWarning, minres, spsolve

from solvers.assembler import AssembledSystem
from solvers.exceptions import NonConvergenceError, SingularSystemError

logger = logging.getLogger(__name__)

# Largest augmented system handed to the dense oracle
DENSE_LIMIT = 20000

# Floor for the MINRES stopping tolerance on restarts
MIN_RTOL = 10.0 * np.finfo(float).eps


class SolveMethod(str, Enum):
    KRYLOV = 'krylov'
    DIRECT = 'direct'
    SPARSE_DIRECT = 'sparse-direct'

    @classmethod
    def parse(cls, value) -> 'SolveMethod':
        text = str(getattr(value, 'value', value)).strip().lower().replace('_', '-')
        aliases = {'minres': 'krylov', 'dense': 'direct', 'oracle': 'direct', 'spsolve': 'sparse-direct'}
        try:
            return cls(aliases.get(text, text))
        except ValueError:
            raise ValueError(f"Unknown solve method: {value}") from None


@dataclass(frozen=True)
class SolveOptions:
    """Saddle solve settings; max_iterations=None means 50 x unknowns"""

    rel_tolerance: float = 1e-10
    max_iterations: Optional[int] = None
    method: SolveMethod = SolveMethod.KRYLOV
    precondition: bool = False
    dense_limit: int = DENSE_LIMIT

    def __post_init__(self):
        object.__setattr__(self, 'method', SolveMethod.parse(self.method))
        if not 0.0 < self.rel_tolerance < 1.0:
            raise ValueError(f"Relative tolerance must lie in (0, 1), got {self.rel_tolerance}")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ValueError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if self.dense_limit < 1:
            raise ValueError(f"dense_limit must be >= 1, got {self.dense_limit}")

    def iteration_budget(self, n_unknowns: int) -> int:
        return self.max_iterations if self.max_iterations is not None else 50 * n_unknowns


@dataclass(frozen=True, eq=False)
class SolveResult:
    """Velocity, zero-mean pressure, true relative residual and iteration count"""

    u: np.ndarray
    p: np.ndarray
    residual_norm: float
    iterations: int
    multiplier: float = 0.0
    seconds: float = 0.0

    def __iter__(self) -> Iterator:
        return iter((self.u, self.p, self.residual_norm, self.iterations))


def _relative_residual(K: sp.csr_matrix, x: np.ndarray, b: np.ndarray, b_norm: float) -> float:
    return float(np.linalg.norm(b - K @ x) / b_norm)


def block_preconditioner(system: AssembledSystem) -> sp.dia_matrix:
    """
    Inverse of the block-diagonal approximation diag(nu A), |T|/nu, 1

    Returns:
        SPD diagonal matrix approximating the inverse of the saddle matrix
    """
    velocity = system.nu * system.A.diagonal()
    pressure = system.pressure_mean / system.nu
    diagonal = np.concatenate([velocity, pressure, [1.0]])
    if np.any(diagonal <= 0.0):
        raise SingularSystemError("Block preconditioner needs a positive diagonal")
    return sp.diags(1.0 / diagonal)


def _split(system: AssembledSystem, x: np.ndarray, residual: float, iterations: int, seconds: float) -> SolveResult:
    nu, npr = system.n_velocity, system.n_pressure
    u = x[:nu].copy()
    p = x[nu:nu + npr].copy()
    m = system.pressure_mean
    p -= np.dot(m, p) / m.sum()
    return SolveResult(u, p, residual, iterations, multiplier=float(x[-1]), seconds=seconds)


def _krylov(K: sp.csr_matrix, b: np.ndarray, b_norm: float, system: AssembledSystem, opts: SolveOptions):
    """
    Restarted MINRES on the true relative residual

    minres stops on a backward-error estimate scaled by ||K|| ||x||, which
    is far looser than ||b - Kx|| / ||b|| once the penalty is large. Each
    restart tightens rtol by the ratio of the observed to the target
    residual. Stagnation is declared only when a tightened pass brought
    no improvement.
    """
    budget = opts.iteration_budget(K.shape[0])
    M = block_preconditioner(system) if opts.precondition else None
    x = np.zeros_like(b)
    rtol = 0.1 * opts.rel_tolerance
    used = 0
    best = np.inf
    tightened = False

    while True:
        count = [0]

        def _callback(_xk):
            count[0] += 1

        x, info = minres(K, b, x0=x, rtol=rtol, maxiter=budget - used, M=M, callback=_callback)
        used += count[0]
        residual = _relative_residual(K, x, b, b_norm)
        logger.debug("MINRES pass: info=%d, rtol %.1e, %d iterations, true residual %.3e",
                     info, rtol, count[0], residual)

        if residual <= opts.rel_tolerance:
            return x, residual, used
        improved = residual < best * (1.0 - 1e-3)
        if used >= budget or (tightened and not improved):
            raise NonConvergenceError(min(best, residual), used)
        best = min(best, residual)

        next_rtol = max(rtol * opts.rel_tolerance / residual, MIN_RTOL)
        tightened = next_rtol < rtol
        if not (tightened or improved):
            raise NonConvergenceError(best, used)
        rtol = next_rtol


def _dense(K: sp.csr_matrix, b: np.ndarray, limit: int = DENSE_LIMIT) -> np.ndarray:
    if K.shape[0] > limit:
        raise ValueError(f"Dense oracle limited to {limit} unknowns, system has {K.shape[0]}")
    try:
        with warnings.catch_warnings():
            warnings.simplefilter('error', scipy.linalg.LinAlgWarning)
            return scipy.linalg.solve(K.toarray(), b, assume_a='sym')
    except (scipy.linalg.LinAlgError, scipy.linalg.LinAlgWarning) as exc:
        raise SingularSystemError(f"Dense symmetric factorization failed: {exc}") from exc


def _sparse_direct(K: sp.csr_matrix, b: np.ndarray) -> np.ndarray:
    with warnings.catch_warnings():
        warnings.simplefilter('error', MatrixRankWarning)
        try:
            x = spsolve(K.tocsc(), b)
        except (MatrixRankWarning, RuntimeError) as exc:
            raise SingularSystemError(f"Sparse factorization failed: {exc}") from exc
    if not np.all(np.isfinite(x)):
        raise SingularSystemError("Sparse factorization produced non-finite values")
    return x


def solve_saddle(system: AssembledSystem, opts: Optional[SolveOptions] = None) -> SolveResult:
    """
    Solve the saddle system with the zero-mean pressure multiplier

    Args:
        system: AssembledSystem
        opts: SolveOptions, defaults to unpreconditioned MINRES at 1e-10

    Returns:
        SolveResult with the residual recomputed from the final iterate

    Raises:
        NonConvergenceError: Krylov budget exhausted or stagnation
        SingularSystemError: Factorization breakdown
    """
    opts = opts or SolveOptions()
    K = system.saddle_matrix()
    b = system.saddle_rhs()
    b_norm = float(np.linalg.norm(b))
    start = time.perf_counter()

    if b_norm == 0.0:
        logger.info("Zero right-hand side, returning the zero solution")
        return _split(system, np.zeros_like(b), 0.0, 0, 0.0)

    iterations = 0
    if opts.method is SolveMethod.KRYLOV:
        x, residual, iterations = _krylov(K, b, b_norm, system, opts)
    else:
        x = _dense(K, b, opts.dense_limit) if opts.method is SolveMethod.DIRECT else _sparse_direct(K, b)
        residual = _relative_residual(K, x, b, b_norm)

    seconds = time.perf_counter() - start
    logger.info("Solved %d unknowns with %s: residual %.3e, %d iterations, %.2fs",
                K.shape[0], opts.method.value, residual, iterations, seconds)
    return _split(system, x, residual, iterations, seconds)


def direct_oracle(system: AssembledSystem) -> SolveResult:
    """Dense symmetric-indefinite reference solve for small systems"""
    return solve_saddle(system, SolveOptions(method=SolveMethod.DIRECT))
