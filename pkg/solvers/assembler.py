import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np
import scipy.io
import scipy.sparse as sp

from fem.quadrature import cell_quadrature, triangle_rule
from fem.spaces import DofMap, Scheme, cr_gradients, cr_shape_values
from meshing.generator import Mesh
from problems.manufactured import Problem
from solvers.penalty import PenaltyMode, penalty_weights

logger = logging.getLogger(__name__)

RHS_DEGREE = 5


@dataclass(frozen=True, eq=False)
class AssembledSystem:
    """
    Discrete Stokes operators of one scheme on one mesh

    A is the velocity operator for one scheme, B the divergence coupling
    (rows: pressures), rhs the velocity load. The pressure load is zero
    for the Stokes problem and only set for manufactured discrete tests.
    """

    A: sp.csr_matrix
    B: sp.csr_matrix
    rhs: np.ndarray
    dof_map: DofMap
    scheme: Scheme
    nu: float
    pressure_mean: np.ndarray
    penalty: Optional[PenaltyMode] = None
    rhs_pressure: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.rhs_pressure is None:
            object.__setattr__(self, 'rhs_pressure', np.zeros(self.B.shape[0]))

    @property
    def n_velocity(self) -> int:
        return self.A.shape[0]

    @property
    def n_pressure(self) -> int:
        return self.B.shape[0]

    @property
    def n_unknowns(self) -> int:
        """Size of the augmented system: velocity, pressure and one multiplier"""
        return self.n_velocity + self.n_pressure + 1

    def saddle_matrix(self) -> sp.csr_matrix:
        """[[nu A, B^T, 0], [B, 0, m], [0, m^T, 0]]"""
        m = sp.csr_matrix(self.pressure_mean.reshape(-1, 1))
        blocks = [
            [self.nu * self.A, self.B.T, None],
            [self.B, None, m],
            [None, m.T, None],
        ]
        return sp.bmat(blocks, format='csr')

    def saddle_rhs(self) -> np.ndarray:
        return np.concatenate([self.rhs, self.rhs_pressure, [0.0]])

    def with_rhs(self, rhs: np.ndarray, rhs_pressure: Optional[np.ndarray] = None) -> 'AssembledSystem':
        rhs = np.asarray(rhs, dtype=float)
        if rhs.shape != (self.n_velocity,):
            raise ValueError(f"Velocity load has shape {rhs.shape}, expected ({self.n_velocity},)")
        if rhs_pressure is None:
            rhs_pressure = np.zeros(self.n_pressure)
        rhs_pressure = np.asarray(rhs_pressure, dtype=float)
        if rhs_pressure.shape != (self.n_pressure,):
            raise ValueError(f"Pressure load has shape {rhs_pressure.shape}, expected ({self.n_pressure},)")
        return replace(self, rhs=rhs, rhs_pressure=rhs_pressure)

    def export_matrix_market(self, path: Union[str, Path]) -> Path:
        """Write the augmented saddle matrix in MatrixMarket coordinate format"""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        scipy.io.mmwrite(str(path), self.saddle_matrix().tocoo(), symmetry='symmetric')
        logger.info("Saddle matrix (%d unknowns) written to %s", self.n_unknowns, path)
        return path


def pressure_mean_vector(mesh: Mesh) -> np.ndarray:
    """m with m_T = |T|, so that m^T p = int p dx for P0 pressures"""
    return np.array(mesh.areas, dtype=float)


def _symmetric_from_triplets(rows: np.ndarray, cols: np.ndarray, values: np.ndarray, size: int) -> sp.csr_matrix:
    """
    Sum the upper-triangle triplets and mirror them, giving A = A^T bit for bit

    Every local block is emitted in both orientations, so the strictly
    lower triplets duplicate upper ones and are dropped.
    """
    upper = rows <= cols
    U = sp.coo_matrix((values[upper], (rows[upper], cols[upper])), shape=(size, size)).tocsr()
    U.sum_duplicates()
    return (U + sp.triu(U, k=1, format='csr').T).tocsr()


def _stiffness_triplets(mesh: Mesh, dofs: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    grads = cr_gradients(mesh)
    local = mesh.areas[:, None, None] * np.einsum('tid,tjd->tij', grads, grads)
    rows = np.repeat(dofs, 3, axis=1).ravel()
    cols = np.tile(dofs, (1, 3)).ravel()
    return rows, cols, local.ravel()


def _penalty_triplets(mesh: Mesh, dofs: np.ndarray, mode: PenaltyMode) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Midpoint jump coupling kappa_F |F| [[u]](x_F) [[v]](x_F) for cell-based CR DOFs"""
    weights = penalty_weights(mesh, mode) * mesh.face_lengths

    interior = mesh.interior_faces
    d1 = dofs[mesh.face_cells[interior, 0], mesh.face_local[interior, 0]]
    d2 = dofs[mesh.face_cells[interior, 1], mesh.face_local[interior, 1]]
    w = weights[interior]

    boundary = mesh.boundary_faces
    db = dofs[mesh.face_cells[boundary, 0], mesh.face_local[boundary, 0]]

    rows = np.concatenate([d1, d2, d1, d2, db])
    cols = np.concatenate([d1, d2, d2, d1, db])
    values = np.concatenate([w, w, -w, -w, weights[boundary]])
    return rows, cols, values


def _divergence(mesh: Mesh, dof_map: DofMap) -> sp.csr_matrix:
    """B[T, v] = -int_T div_h v dx, i.e. -|F_j| n_{j,c} per local face"""
    outward = mesh.cell_normals * mesh.face_lengths[mesh.cell_faces][:, :, None]
    rows = np.repeat(np.arange(mesh.n_triangles), 3)
    blocks = []
    for c in range(2):
        cols = dof_map.cell_dofs(c).ravel()
        blocks.append(sp.coo_matrix((-outward[:, :, c].ravel(), (rows, cols)),
                                    shape=(mesh.n_triangles, dof_map.n_velocity)))
    return (blocks[0] + blocks[1]).tocsr()


def assemble_operators(mesh: Mesh, scheme: Scheme,
                       mode: PenaltyMode = PenaltyMode.KAPPA) -> Tuple[sp.csr_matrix, sp.csr_matrix, DofMap]:
    """
    Velocity operator A and divergence B without any load

    WOPSIP: broken stiffness plus the midpoint penalty on every face.
    WBCR: broken stiffness on the midpoint-continuous space; boundary DOFs
    are eliminated by keeping identity rows and zero B columns.

    Args:
        mesh: Mesh
        scheme: Scheme
        mode: Penalty mode, ignored for WBCR

    Returns:
        (A, B, dof_map)
    """
    dof_map = DofMap(mesh, scheme)
    size = dof_map.per_component
    local_dofs = dof_map.cell_dofs(0)

    rows, cols, values = _stiffness_triplets(mesh, local_dofs)
    if dof_map.scheme is Scheme.WOPSIP:
        pr, pc, pv = _penalty_triplets(mesh, local_dofs, PenaltyMode.parse(mode))
        rows = np.concatenate([rows, pr])
        cols = np.concatenate([cols, pc])
        values = np.concatenate([values, pv])

    component = _symmetric_from_triplets(rows, cols, values, size)
    A = sp.block_diag([component, component], format='csr')
    B = _divergence(mesh, dof_map)

    constrained = dof_map.constrained_velocity()
    if constrained.any():
        keep = sp.diags((~constrained).astype(float))
        A = (keep @ A @ keep + sp.diags(constrained.astype(float))).tocsr()
        B = (B @ keep).tocsr()
        B.eliminate_zeros()

    return A, B, dof_map


def _check_inputs(mesh: Mesh, problem: Problem) -> None:
    if mesh.n_triangles == 0:
        raise ValueError("Cannot assemble on an empty mesh")
    if not problem.nu > 0.0:
        raise ValueError(f"Viscosity must be positive, got {problem.nu}")


def _wopsip_load(mesh: Mesh, problem: Problem) -> np.ndarray:
    rule = triangle_rule(RHS_DEGREE)
    points, weights = cell_quadrature(mesh, rule)
    forcing = problem.forcing(points)
    shapes = cr_shape_values(rule.points)
    local = np.einsum('tq,tqc,qj->ctj', weights, forcing, shapes)
    return local.reshape(2, -1).ravel()


def _wbcr_lifted_load(mesh: Mesh, problem: Problem, dof_map: DofMap) -> np.ndarray:
    """
    Load tested against the RT interpolant of each CR basis field

    On T the lift of theta_F e_c is |F| n_{F,c} theta_j^RT, so the local
    entry is |F_j| n_out_{j,c} / (2|T|) int_T f . (x - P_j) dx.
    """
    points, weights = cell_quadrature(mesh, triangle_rule(RHS_DEGREE))
    forcing = problem.forcing(points)
    offsets = points[:, :, None, :] - mesh.cell_corners[:, None, :, :]
    moments = np.einsum('tq,tqd,tqjd->tj', weights, forcing, offsets)
    moments /= 2.0 * mesh.areas[:, None]

    outward = mesh.cell_normals * mesh.face_lengths[mesh.cell_faces][:, :, None]
    rhs = np.zeros(dof_map.n_velocity)
    for c in range(2):
        local = outward[:, :, c] * moments
        rhs += np.bincount(dof_map.cell_dofs(c).ravel(), weights=local.ravel(), minlength=dof_map.n_velocity)
    rhs[dof_map.constrained_velocity()] = 0.0
    return rhs


def assemble_wopsip(mesh: Mesh, problem: Problem, mode: PenaltyMode = PenaltyMode.KAPPA) -> AssembledSystem:
    """
    Assemble the WOPSIP saddle-point system

    Args:
        mesh: Mesh
        problem: Supplies forcing and viscosity
        mode: Penalty scaling

    Returns:
        AssembledSystem on the cell-based CR layout
    """
    _check_inputs(mesh, problem)
    mode = PenaltyMode.parse(mode)
    A, B, dof_map = assemble_operators(mesh, Scheme.WOPSIP, mode)
    rhs = _wopsip_load(mesh, problem)
    logger.info("Assembled WOPSIP (%s) on %d triangles: %d velocity, %d pressure unknowns, nnz(A)=%d",
                mode.value, mesh.n_triangles, dof_map.n_velocity, dof_map.n_pressure, A.nnz)
    return AssembledSystem(A, B, rhs, dof_map, Scheme.WOPSIP, float(problem.nu),
                           pressure_mean_vector(mesh), penalty=mode)


def assemble_wbcr(mesh: Mesh, problem: Problem) -> AssembledSystem:
    """
    Assemble the well-balanced CR system with the RT-lifted load

    Args:
        mesh: Mesh
        problem: Supplies forcing and viscosity

    Returns:
        AssembledSystem on the edge-based CR layout
    """
    _check_inputs(mesh, problem)
    A, B, dof_map = assemble_operators(mesh, Scheme.WBCR)
    rhs = _wbcr_lifted_load(mesh, problem, dof_map)
    logger.info("Assembled WBCR on %d triangles: %d velocity (%d constrained), %d pressure unknowns",
                mesh.n_triangles, dof_map.n_velocity, int(dof_map.constrained_velocity().sum()),
                dof_map.n_pressure)
    return AssembledSystem(A, B, rhs, dof_map, Scheme.WBCR, float(problem.nu), pressure_mean_vector(mesh))


def assemble(mesh: Mesh, problem: Problem, scheme: Scheme,
             mode: PenaltyMode = PenaltyMode.KAPPA) -> AssembledSystem:
    if Scheme.parse(scheme) is Scheme.WOPSIP:
        return assemble_wopsip(mesh, problem, mode)
    return assemble_wbcr(mesh, problem)
