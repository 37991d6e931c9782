import logging
import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional

import numpy as np

from fem.quadrature import cell_quadrature, triangle_rule
from fem.spaces import DofMap, Scheme, cr_gradients, cr_local_basis, cr_shape_values, face_averages
from meshing.generator import Mesh
from problems.manufactured import Problem
from solvers.penalty import PenaltyMode, penalty_weights

logger = logging.getLogger(__name__)

NORM_DEGREE = 10


@dataclass(frozen=True)
class ErrorReport:
    """Absolute and relative errors of one discrete solution"""

    err_h1: float
    jump: float
    energy: float
    err_l2u: float
    err_l2p: float
    norm_h1: float
    norm_l2u: float
    norm_l2p: float

    @staticmethod
    def _ratio(value: float, reference: float) -> float:
        return value / reference if reference > 0.0 else float('nan')

    @property
    def rel_h1(self) -> float:
        return self._ratio(self.err_h1, self.norm_h1)

    @property
    def rel_energy(self) -> float:
        return self._ratio(self.energy, self.norm_h1)

    @property
    def rel_l2u(self) -> float:
        return self._ratio(self.err_l2u, self.norm_l2u)

    @property
    def rel_l2p(self) -> float:
        return self._ratio(self.err_l2p, self.norm_l2p)

    @property
    def combined(self) -> float:
        """(|u - u_h|_h + ||p - p_h||) / (|u|_1 + ||p||)"""
        return self._ratio(self.energy + self.err_l2p, self.norm_h1 + self.norm_l2p)

    def as_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data.update(rel_h1=self.rel_h1, rel_energy=self.rel_energy, rel_l2u=self.rel_l2u,
                    rel_l2p=self.rel_l2p, combined=self.combined)
        return data


class ErrorAnalyzer:
    """Measures discrete solutions against a manufactured solution on one mesh"""

    def __init__(self, mesh: Mesh, problem: Problem, scheme: Scheme,
                 mode: PenaltyMode = PenaltyMode.KAPPA):
        self.mesh = mesh
        self.problem = problem
        self.dof_map = DofMap(mesh, scheme)
        self.mode = PenaltyMode.parse(mode)

        rule = triangle_rule(NORM_DEGREE)
        self._points, self._weights = cell_quadrature(mesh, rule)
        self._shapes = cr_shape_values(rule.points)
        self._exact_u = problem.velocity(self._points)
        self._exact_grad = problem.velocity_gradient(self._points)
        self._exact_p = problem.pressure(self._points)

    def exact_norms(self) -> Dict[str, float]:
        """|u|_1, ||u||, ||p|| of the exact solution with the degree-10 rule"""
        w = self._weights
        return {
            'h1': math.sqrt(np.einsum('tq,tqij->', w, self._exact_grad ** 2)),
            'l2u': math.sqrt(np.einsum('tq,tqi->', w, self._exact_u ** 2)),
            'l2p': math.sqrt(np.einsum('tq,tq->', w, self._exact_p ** 2)),
        }

    def analyze_solution(self, u: np.ndarray, p: np.ndarray) -> ErrorReport:
        """
        Error norms of a discrete pair

        Args:
            u: Velocity coefficients in the scheme's layout
            p: P0 pressure per triangle

        Returns:
            ErrorReport
        """
        coefficients = self.dof_map.cell_coefficients(u)
        p = np.asarray(p, dtype=float)
        if p.shape != (self.mesh.n_triangles,):
            raise ValueError(f"Pressure vector has shape {p.shape}, expected ({self.mesh.n_triangles},)")

        w = self._weights
        uh = np.einsum('ctj,qj->tqc', coefficients, self._shapes)
        grad_h = np.einsum('ctj,tjd->tcd', coefficients, cr_gradients(self.mesh))

        err_h1 = math.sqrt(np.einsum('tq,tqij->', w, (self._exact_grad - grad_h[:, None]) ** 2))
        err_l2u = math.sqrt(np.einsum('tq,tqi->', w, (self._exact_u - uh) ** 2))
        err_l2p = math.sqrt(np.einsum('tq,tq->', w, (self._exact_p - p[:, None]) ** 2))
        jump = self._jump_seminorm(coefficients)
        norms = self.exact_norms()

        report = ErrorReport(
            err_h1=err_h1, jump=jump, energy=math.sqrt(err_h1 ** 2 + jump ** 2),
            err_l2u=err_l2u, err_l2p=err_l2p,
            norm_h1=norms['h1'], norm_l2u=norms['l2u'], norm_l2p=norms['l2p'],
        )
        logger.debug("Errors on %d triangles: %s", self.mesh.n_triangles, report)
        return report

    def _jump_seminorm(self, coefficients: np.ndarray) -> float:
        """
        Penalty-weighted face averages of the jumps of u - u_h

        The exact velocity is continuous, so interior faces only see the
        discrete midpoint jump; boundary faces compare the exact face
        average with the discrete midpoint value.
        """
        if self.dof_map.scheme is Scheme.WBCR:
            return 0.0

        mesh = self.mesh
        weights = penalty_weights(mesh, self.mode) * mesh.face_lengths
        values = coefficients.transpose(1, 2, 0)

        interior = mesh.interior_faces
        inner = values[mesh.face_cells[interior, 0], mesh.face_local[interior, 0]]
        outer = values[mesh.face_cells[interior, 1], mesh.face_local[interior, 1]]
        interior_jump = -(inner - outer)

        boundary = mesh.boundary_faces
        exact = face_averages(mesh, self.problem.velocity)[boundary]
        trace = values[mesh.face_cells[boundary, 0], mesh.face_local[boundary, 0]]
        boundary_jump = exact - trace

        total = (np.dot(weights[interior], np.sum(interior_jump ** 2, axis=1))
                 + np.dot(weights[boundary], np.sum(boundary_jump ** 2, axis=1)))
        return math.sqrt(total)


def error_report(mesh: Mesh, problem: Problem, u: np.ndarray, p: np.ndarray, scheme: Scheme,
                 mode: PenaltyMode = PenaltyMode.KAPPA) -> ErrorReport:
    """Shorthand for ErrorAnalyzer(...).analyze_solution(u, p)"""
    return ErrorAnalyzer(mesh, problem, scheme, mode).analyze_solution(u, p)


def discrete_energy_norm(mesh: Mesh, v: np.ndarray, mode: PenaltyMode = PenaltyMode.KAPPA,
                         h: Optional[float] = None) -> float:
    """
    Squared |v|_h of a cell-based CR field, evaluated face by face

    Traces are evaluated at face midpoints through the local bases, so
    this does not share code with the assembled penalty.

    Args:
        mesh: Mesh
        v: WOPSIP velocity coefficients
        mode: Penalty scaling
        h: Global mesh size, defaults to mesh.h

    Returns:
        sum_T |grad v|^2 |T| + sum_F kappa_F |F| |Pi_F [[v]]|^2
    """
    dof_map = DofMap(mesh, Scheme.WOPSIP)
    coefficients = dof_map.cell_coefficients(v)
    kappa = penalty_weights(mesh, mode, h)

    total = 0.0
    bases = [cr_local_basis(mesh, t) for t in range(mesh.n_triangles)]
    for t, basis in enumerate(bases):
        grad = coefficients[:, t, :] @ basis.gradients
        total += mesh.areas[t] * float(np.sum(grad ** 2))

    for f in range(mesh.n_faces):
        face = mesh.face(f)
        traces = [bases[t].evaluate(face.midpoint) @ coefficients[:, t, :].T for t in face.cells]
        jump = traces[0] - traces[1] if face.is_interior else traces[0]
        total += kappa[f] * face.length * float(np.sum(jump ** 2))
    return total


def convergence_rate(err_coarse: float, err_fine: float) -> float:
    """
    Observed order between two meshes with h halved

    Args:
        err_coarse: Error on the coarser mesh
        err_fine: Error on the finer mesh

    Returns:
        log2(err_coarse / err_fine)
    """
    if not (err_coarse > 0.0 and err_fine > 0.0):
        raise ValueError(f"Convergence rate needs positive errors, got {err_coarse} and {err_fine}")
    return math.log2(err_coarse / err_fine)
