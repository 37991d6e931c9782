from enum import Enum
from typing import Optional

import numpy as np

from meshing.generator import Mesh

# sum of omega_i^2 / l_i with omega_i = sqrt(l_i) / (sqrt(l1) + sqrt(l2))
INTERIOR_FACTOR = 2.0


class PenaltyMode(str, Enum):
    KAPPA = 'kappa'             # 2 h^-2 (sqrt(l1) + sqrt(l2))^-2
    KAPPA_STAR = 'kappa-star'   # same without the h^-2 scaling

    @classmethod
    def parse(cls, value) -> 'PenaltyMode':
        text = str(getattr(value, 'value', value)).strip().lower().replace('_', '-')
        aliases = {'kappa*': 'kappa-star', 'star': 'kappa-star', 'kappastar': 'kappa-star'}
        try:
            return cls(aliases.get(text, text))
        except ValueError:
            raise ValueError(f"Unknown penalty mode: {value}") from None


def _scale(mesh: Mesh, h: Optional[float], mode: PenaltyMode) -> float:
    mode = PenaltyMode.parse(mode)
    if mode is PenaltyMode.KAPPA_STAR:
        return 1.0
    h = mesh.h if h is None else h
    if h <= 0.0:
        raise ValueError(f"Mesh size h must be positive, got {h}")
    return h ** -2


def penalty_kappa(mesh: Mesh, face_id: int, h: Optional[float] = None,
                  mode: PenaltyMode = PenaltyMode.KAPPA) -> float:
    """
    Penalty weight of one face

    Interior faces use 2 (sqrt(l1) + sqrt(l2))^-2, boundary faces 1/l, both
    multiplied by h^-2 in KAPPA mode.

    Args:
        mesh: Mesh
        face_id: Face index
        h: Global mesh size, defaults to mesh.h
        mode: PenaltyMode

    Returns:
        kappa_F
    """
    face = mesh.face(face_id)
    scale = _scale(mesh, h, mode)
    if face.is_interior:
        l1, l2 = face.ell
        return scale * INTERIOR_FACTOR / (np.sqrt(l1) + np.sqrt(l2)) ** 2
    return scale / face.ell[0]


def penalty_weights(mesh: Mesh, mode: PenaltyMode = PenaltyMode.KAPPA, h: Optional[float] = None) -> np.ndarray:
    """kappa_F for every face, vectorized form of penalty_kappa"""
    scale = _scale(mesh, h, mode)
    ell = mesh.face_ell
    interior = ~mesh.is_boundary_face
    weights = np.empty(mesh.n_faces)
    weights[interior] = INTERIOR_FACTOR / (np.sqrt(ell[interior, 0]) + np.sqrt(ell[interior, 1])) ** 2
    weights[~interior] = 1.0 / ell[~interior, 0]
    return scale * weights
