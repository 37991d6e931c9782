import logging
import math
from dataclasses import asdict, dataclass
from typing import Any, Dict

import numpy as np
import scipy.linalg

from fem.spaces import DofMap, Scheme
from meshing.generator import Mesh
from solvers.assembler import assemble_operators
from solvers.penalty import PenaltyMode, penalty_weights

logger = logging.getLogger(__name__)

# Dense Schur complements beyond this many pressures are not attempted
INF_SUP_LIMIT = 4096


@dataclass(frozen=True)
class PenaltyDiagnostics:
    """Maxima over interior faces of the penalty-size indicators"""

    inverse_h: float
    tau_f: float
    tau_ave: float
    tau_dg: float
    tau_wop: float

    def as_dict(self) -> Dict[str, Any]:
        return asdict(self)


def penalty_diagnostics(mesh: Mesh) -> PenaltyDiagnostics:
    """
    Penalty indicators of a mesh

    tau_f = max 1/h_F, tau_ave = max (1/l1 + 1/l2)/4,
    tau_dg = max 2/(sqrt(l1) + sqrt(l2))^2 and tau_wop = tau_dg / h^2. The last
    two are the largest interior kappa_F* and kappa_F of the assembled scheme.

    Args:
        mesh: Mesh

    Returns:
        PenaltyDiagnostics
    """
    interior = mesh.interior_faces
    if len(interior) == 0:
        raise ValueError("Penalty diagnostics need at least one interior face")
    ell = mesh.face_ell[interior]
    lengths = mesh.face_lengths[interior]

    tau_dg = float(np.max(penalty_weights(mesh, PenaltyMode.KAPPA_STAR)[interior]))
    return PenaltyDiagnostics(
        inverse_h=1.0 / mesh.h,
        tau_f=float(np.max(1.0 / lengths)),
        tau_ave=float(np.max(0.25 * (1.0 / ell[:, 0] + 1.0 / ell[:, 1]))),
        tau_dg=tau_dg,
        tau_wop=tau_dg / mesh.h ** 2,
    )


def dof_count(mesh: Mesh, scheme: Scheme) -> int:
    """Nodal points of velocity and pressure: 7 Ne for WOPSIP, 2 #faces + Ne for WBCR"""
    return DofMap(mesh, scheme).n_nodal


def inf_sup_constant(mesh: Mesh, scheme: Scheme, mode: PenaltyMode = PenaltyMode.KAPPA) -> float:
    """
    Discrete inf-sup constant over zero-mean P0 pressures

    Smallest eigenvalue of M^-1/2 B A^-1 B^T M^-1/2 on the complement of
    the constants, M the P0 mass. The constant is its square root.

    Args:
        mesh: Mesh, small enough for dense linear algebra
        scheme: Scheme
        mode: Penalty scaling for WOPSIP

    Returns:
        beta_h
    """
    if mesh.n_triangles > INF_SUP_LIMIT:
        raise ValueError(f"Inf-sup probe limited to {INF_SUP_LIMIT} triangles, mesh has {mesh.n_triangles}")

    A, B, _ = assemble_operators(mesh, scheme, mode)
    Bd = B.toarray()
    schur = Bd @ scipy.linalg.solve(A.toarray(), Bd.T, assume_a='pos')

    root_mass = np.sqrt(mesh.areas)
    scaled = schur / np.outer(root_mass, root_mass)
    complement = scipy.linalg.null_space(root_mass[None, :])
    eigenvalues = scipy.linalg.eigvalsh(complement.T @ scaled @ complement)

    beta = math.sqrt(max(float(eigenvalues[0]), 0.0))
    logger.info("Inf-sup probe %s on %d triangles: beta_h = %.5f", Scheme.parse(scheme).value,
                mesh.n_triangles, beta)
    return beta
