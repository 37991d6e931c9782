from dataclasses import dataclass
from enum import Enum
from typing import Callable, Union

import numpy as np

from fem.quadrature import cell_quadrature, edge_average, integrate_on_triangle, triangle_rule
from meshing.generator import Mesh


class Scheme(str, Enum):
    """Discretization and its velocity DOF layout"""

    WOPSIP = 'wopsip'   # discontinuous, three CR DOFs per triangle and component
    WBCR = 'wbcr'       # continuous at midpoints, one DOF per face and component

    @classmethod
    def parse(cls, value) -> 'Scheme':
        try:
            return cls(str(getattr(value, 'value', value)).strip().lower())
        except ValueError:
            raise ValueError(f"Unknown scheme: {value}") from None


def cr_gradients(mesh: Mesh, cells: Union[int, slice] = slice(None)) -> np.ndarray:
    """Constant gradients of the local CR basis, grad theta_j = |F_j| n_j / |T|, shape (ne, 3, 2), or (3, 2) for one cell"""
    faces = mesh.cell_faces[cells]
    normals = mesh.cell_signs[cells][..., None] * mesh.face_normals[faces]
    return mesh.face_lengths[faces][..., None] * normals / np.asarray(mesh.areas[cells])[..., None, None]


def cr_shape_values(barycentric: np.ndarray) -> np.ndarray:
    """theta_j = 1 - 2 lambda_j for barycentric points (..., 3)"""
    return 1.0 - 2.0 * barycentric


@dataclass(frozen=True, eq=False)
class CRLocalBasis:
    """Crouzeix-Raviart basis on one triangle, dual to the face averages"""

    triangle: int
    corners: np.ndarray
    gradients: np.ndarray

    @property
    def centroid(self) -> np.ndarray:
        return self.corners.mean(axis=0)

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        """Basis values at points (..., 2), returns (..., 3)"""
        offset = np.asarray(x) - self.centroid
        return 1.0 / 3.0 + offset @ self.gradients.T

    def combine(self, coefficients: np.ndarray, x: np.ndarray) -> np.ndarray:
        return self.evaluate(x) @ np.asarray(coefficients)


@dataclass(frozen=True, eq=False)
class RTLocalBasis:
    """Lowest-order Raviart-Thomas basis, theta_i = iota_i / (2|T|) (x - P_i)"""

    triangle: int
    corners: np.ndarray
    signs: np.ndarray
    area: float

    @property
    def divergences(self) -> np.ndarray:
        return self.signs / self.area

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        """Basis fields at points (..., 2), returns (..., 3, 2)"""
        x = np.asarray(x)
        offsets = x[..., None, :] - self.corners
        return (self.signs / (2.0 * self.area))[:, None] * offsets

    def combine(self, coefficients: np.ndarray, x: np.ndarray) -> np.ndarray:
        return np.einsum('...id,i->...d', self.evaluate(x), np.asarray(coefficients))


def cr_local_basis(mesh: Mesh, t: int) -> CRLocalBasis:
    triangle = mesh.triangle(t)
    grads = cr_gradients(mesh, t)
    return CRLocalBasis(t, triangle.corners, grads)


def rt_local_basis(mesh: Mesh, t: int) -> RTLocalBasis:
    triangle = mesh.triangle(t)
    return RTLocalBasis(t, triangle.corners, np.array(mesh.cell_signs[t]), triangle.area)


def _local_face_endpoints(mesh: Mesh, t: int) -> np.ndarray:
    return mesh.vertices[mesh.face_vertices[mesh.cell_faces[t]]]


def cr_interpolate_local(mesh: Mesh, t: int, v: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """
    Local CR interpolant: coefficients are the face averages of v

    Args:
        mesh: Mesh
        t: Triangle id
        v: Scalar function of (..., 2) points

    Returns:
        (3,) coefficients ordered by local face
    """
    return edge_average(v, _local_face_endpoints(mesh, t))


def rt_interpolate_local(mesh: Mesh, t: int, v: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """
    Local RT interpolant: coefficients are the fluxes int_F v . n_F ds

    The fluxes use the stored face normals, matching RTLocalBasis.

    Args:
        mesh: Mesh
        t: Triangle id
        v: Vector function of (..., 2) points returning (..., 2)

    Returns:
        (3,) flux coefficients ordered by local face
    """
    faces = mesh.cell_faces[t]
    averages = edge_average(v, _local_face_endpoints(mesh, t))
    return mesh.face_lengths[faces] * np.einsum('fd,fd->f', averages, mesh.face_normals[faces])


def l2_project_cell(mesh: Mesh, t: int, f: Callable[[np.ndarray], np.ndarray]) -> float:
    """Cell average (1/|T|) int_T f dx with the degree-5 rule"""
    triangle = mesh.triangle(t)
    return integrate_on_triangle(f, triangle, triangle_rule(5)) / triangle.area


def l2_project_face(mesh: Mesh, face_id: int, g: Callable[[np.ndarray], np.ndarray]) -> float:
    """Face average (1/|F|) int_F g ds"""
    face = mesh.face(face_id)
    return float(edge_average(g, face.endpoints))


def l2_project_cells(mesh: Mesh, f: Callable[[np.ndarray], np.ndarray], degree: int = 5) -> np.ndarray:
    """Cell averages of f on every triangle"""
    points, weights = cell_quadrature(mesh, triangle_rule(degree))
    return np.einsum('tq,tq->t', weights, f(points)) / mesh.areas


class DofMap:
    """Global numbering of velocity and pressure unknowns"""

    def __init__(self, mesh: Mesh, scheme: Scheme):
        self.mesh = mesh
        self.scheme = Scheme.parse(scheme)

    @property
    def layout(self) -> str:
        return 'cell' if self.scheme is Scheme.WOPSIP else 'edge'

    @property
    def per_component(self) -> int:
        if self.scheme is Scheme.WOPSIP:
            return 3 * self.mesh.n_triangles
        return self.mesh.n_faces

    @property
    def n_velocity(self) -> int:
        return 2 * self.per_component

    @property
    def n_pressure(self) -> int:
        return self.mesh.n_triangles

    @property
    def n_nodal(self) -> int:
        """Nodal points of velocity and pressure, boundary included"""
        return self.n_velocity + self.n_pressure

    def cell_dofs(self, component: int = 0) -> np.ndarray:
        """(ne, 3) global velocity indices of a component, by local face"""
        if self.scheme is Scheme.WOPSIP:
            local = np.arange(3 * self.mesh.n_triangles).reshape(-1, 3)
        else:
            local = np.array(self.mesh.cell_faces)
        return component * self.per_component + local

    def velocity_index(self, component: int, t: int, j: int) -> int:
        return int(self.cell_dofs(component)[t, j])

    def constrained_velocity(self) -> np.ndarray:
        """Boolean mask of strongly constrained (boundary) velocity DOFs"""
        mask = np.zeros(self.n_velocity, dtype=bool)
        if self.scheme is Scheme.WBCR:
            boundary = self.mesh.is_boundary_face
            mask[:self.per_component] = boundary
            mask[self.per_component:] = boundary
        return mask

    def cell_coefficients(self, u: np.ndarray) -> np.ndarray:
        """Gather a velocity vector into (2, ne, 3) per-triangle CR coefficients"""
        u = np.asarray(u)
        if u.shape != (self.n_velocity,):
            raise ValueError(f"Velocity vector has shape {u.shape}, expected ({self.n_velocity},)")
        return np.stack([u[self.cell_dofs(c)] for c in range(2)])


def face_averages(mesh: Mesh, v: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Averages of a vector field over every face, shape (nf, 2)"""
    return edge_average(v, mesh.vertices[mesh.face_vertices])


def global_interpolate_cr(mesh: Mesh, v: Callable[[np.ndarray], np.ndarray], scheme: Scheme) -> np.ndarray:
    """
    Element-wise CR interpolant of a continuous vector field

    Args:
        mesh: Mesh
        v: Vector function of (..., 2) points
        scheme: Target DOF layout

    Returns:
        Velocity coefficient vector of the layout
    """
    dof_map = DofMap(mesh, scheme)
    averages = face_averages(mesh, v)
    if dof_map.scheme is Scheme.WBCR:
        return averages.T.reshape(-1).copy()
    per_cell = averages[mesh.cell_faces]
    return np.concatenate([per_cell[:, :, c].reshape(-1) for c in range(2)])
