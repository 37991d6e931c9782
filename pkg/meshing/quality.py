from dataclasses import asdict, dataclass
from typing import Any, Dict

import numpy as np

from meshing.generator import Mesh


@dataclass(frozen=True)
class MeshQuality:
    """Anisotropy metrics of a triangulation"""

    min_angle_metric: float
    max_angle_metric: float
    h: float
    semi_regularity: float

    def as_dict(self) -> Dict[str, Any]:
        return asdict(self)


def sorted_edge_lengths(mesh: Mesh) -> np.ndarray:
    """Edge lengths per triangle sorted ascending, |L1| <= |L2| <= |L3|"""
    return np.sort(mesh.face_lengths[mesh.cell_faces], axis=1)


def mesh_quality(mesh: Mesh) -> MeshQuality:
    """
    Compute the minimum/maximum angle metrics and semi-regularity

    MinAngle = max |L3|^2 / |T|, MaxAngle = max |L1| |L2| / |T|.
    The semi-regularity ratio H_T / h_T uses h1 = second-longest and
    h2 = shortest edge, H_T = h1 h2 h_T / |T|.

    Args:
        mesh: Mesh

    Returns:
        MeshQuality with exact maxima over all triangles
    """
    lengths = sorted_edge_lengths(mesh)
    areas = mesh.areas
    min_angle = lengths[:, 2] ** 2 / areas
    max_angle = lengths[:, 0] * lengths[:, 1] / areas

    h1, h2, diam = lengths[:, 1], lengths[:, 0], lengths[:, 2]
    big_h = h1 * h2 * diam / areas

    return MeshQuality(
        min_angle_metric=float(min_angle.max()),
        max_angle_metric=float(max_angle.max()),
        h=float(mesh.h),
        semi_regularity=float((big_h / diam).max()),
    )
