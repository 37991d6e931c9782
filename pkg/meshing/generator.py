import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

logger = logging.getLogger(__name__)

# Accepted spellings for each family, roman numerals follow the usual table labels
_FAMILY_ALIASES = {
    'uniform': 'uniform', 'standard': 'uniform', 'i': 'uniform',
    'shishkin': 'shishkin', 'ii': 'shishkin',
    'cosine': 'cosine', 'iii': 'cosine',
    'quadratic': 'quadratic', 'iv': 'quadratic',
}

_FAMILY_LABELS = {'uniform': 'I', 'shishkin': 'II', 'cosine': 'III', 'quadratic': 'IV'}


@dataclass(frozen=True)
class MeshFamily:
    """Tensor-grid family: x1 is always uniform, x2 follows the family"""

    kind: str
    delta: Optional[float] = None

    def __post_init__(self):
        if self.kind not in _FAMILY_LABELS:
            raise ValueError(f"Unknown mesh family: {self.kind}")
        if self.kind == 'shishkin':
            if self.delta is None or not 0.0 < self.delta < 0.25:
                raise ValueError(f"Shishkin meshes need 0 < delta < 1/4, got {self.delta}")

    @classmethod
    def from_name(cls, name: str, delta: Optional[float] = None) -> 'MeshFamily':
        """
        Build a family from a CLI/config name

        Args:
            name: 'uniform', 'shishkin', 'cosine', 'quadratic' or I..IV
            delta: layer width, only used by the Shishkin family

        Returns:
            MeshFamily instance
        """
        kind = _FAMILY_ALIASES.get(str(name).strip().lower())
        if kind is None:
            raise ValueError(f"Unknown mesh family: {name}")
        return cls(kind, delta if kind == 'shishkin' else None)

    @property
    def label(self) -> str:
        return _FAMILY_LABELS[self.kind]

    def transition(self, n: int) -> float:
        """Shishkin transition point tau = 4 delta |ln n|"""
        if self.kind != 'shishkin':
            raise ValueError("Transition point is only defined for Shishkin meshes")
        return 4.0 * self.delta * abs(math.log(n))

    def check_divisions(self, n: int) -> None:
        if int(n) != n or n < 2:
            raise ValueError(f"Need an integer division count n >= 2, got {n}")
        if self.kind == 'shishkin':
            if n % 2:
                raise ValueError(f"Shishkin meshes split at n/2, n must be even (got {n})")
            tau = self.transition(n)
            if not 0.0 < tau < 1.0:
                raise ValueError(
                    f"Shishkin transition tau = {tau:.6g} must lie in (0, 1) for n={n}, delta={self.delta}"
                )

    def vertical_grid(self, n: int) -> np.ndarray:
        """Grid points x2^0 < ... < x2^n of the family"""
        self.check_divisions(n)
        i = np.arange(n + 1, dtype=float)

        if self.kind == 'uniform':
            x2 = i / n
        elif self.kind == 'shishkin':
            tau = self.transition(n)
            half = n // 2
            x2 = np.where(
                i <= half,
                tau * (2.0 / n) * i,
                tau + (1.0 - tau) * (2.0 / n) * (i - half),
            )
        elif self.kind == 'cosine':
            x2 = 0.5 * (1.0 - np.cos(i * np.pi / n))
        else:
            x2 = (i / n) ** 2

        x2[0], x2[-1] = 0.0, 1.0
        return x2

    def __str__(self) -> str:
        if self.kind == 'shishkin':
            return f"{self.kind}(delta={self.delta:g})"
        return self.kind


@dataclass(frozen=True, eq=False)
class Triangle:
    """Read-only view of one mesh triangle"""

    vertex_ids: Tuple[int, int, int]
    corners: np.ndarray
    area: float
    diameter: float
    face_ids: Tuple[int, int, int]


@dataclass(frozen=True, eq=False)
class Face:
    """Read-only view of one mesh face (edge)"""

    vertex_ids: Tuple[int, int]
    endpoints: np.ndarray
    length: float
    midpoint: np.ndarray
    normal: np.ndarray
    cells: Tuple[int, ...]
    ell: Tuple[float, ...]

    @property
    def is_interior(self) -> bool:
        return len(self.cells) == 2


@dataclass(frozen=True, eq=False)
class Mesh:
    """
    Conforming triangulation with full face connectivity.

    Local face j of a triangle is the edge opposite its local vertex j.
    Face normals point from face_cells[:, 0] into face_cells[:, 1] for
    interior faces and outward for boundary faces; cell_signs[t, j] is +1
    when the stored normal of local face j is outward for triangle t.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    areas: np.ndarray
    diameters: np.ndarray
    cell_faces: np.ndarray
    cell_signs: np.ndarray
    face_vertices: np.ndarray
    face_lengths: np.ndarray
    face_midpoints: np.ndarray
    face_normals: np.ndarray
    face_cells: np.ndarray
    face_local: np.ndarray
    face_ell: np.ndarray
    interior_faces: np.ndarray
    boundary_faces: np.ndarray
    h: float
    n: int = 0
    family: Optional[MeshFamily] = field(default=None, compare=False)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    @property
    def n_faces(self) -> int:
        return len(self.face_vertices)

    @property
    def is_boundary_face(self) -> np.ndarray:
        return self.face_cells[:, 1] < 0

    @property
    def cell_corners(self) -> np.ndarray:
        """Vertex coordinates per triangle, shape (n_triangles, 3, 2)"""
        return self.vertices[self.triangles]

    @property
    def centroids(self) -> np.ndarray:
        return self.cell_corners.mean(axis=1)

    @property
    def cell_normals(self) -> np.ndarray:
        """Outward unit normals of the local faces, shape (n_triangles, 3, 2)"""
        return self.cell_signs[:, :, None] * self.face_normals[self.cell_faces]

    def triangle(self, t: int) -> Triangle:
        if not 0 <= t < self.n_triangles:
            raise IndexError(f"Triangle id {t} out of range [0, {self.n_triangles})")
        return Triangle(
            vertex_ids=tuple(int(v) for v in self.triangles[t]),
            corners=self.vertices[self.triangles[t]],
            area=float(self.areas[t]),
            diameter=float(self.diameters[t]),
            face_ids=tuple(int(f) for f in self.cell_faces[t]),
        )

    def face(self, f: int) -> Face:
        if not 0 <= f < self.n_faces:
            raise IndexError(f"Face id {f} out of range [0, {self.n_faces})")
        count = 1 if self.face_cells[f, 1] < 0 else 2
        return Face(
            vertex_ids=tuple(int(v) for v in self.face_vertices[f]),
            endpoints=self.vertices[self.face_vertices[f]],
            length=float(self.face_lengths[f]),
            midpoint=self.face_midpoints[f],
            normal=self.face_normals[f],
            cells=tuple(int(t) for t in self.face_cells[f, :count]),
            ell=tuple(float(v) for v in self.face_ell[f, :count]),
        )


def face_geometry(mesh: Mesh, face_id: int) -> Tuple[float, np.ndarray, np.ndarray, Tuple[float, ...]]:
    """
    Geometric data of a face

    Args:
        mesh: Mesh
        face_id: Face index

    Returns:
        (h_F, n_F, x_F, ell values) with one ell per adjacent triangle
    """
    face = mesh.face(face_id)
    return face.length, face.normal, face.midpoint, face.ell


def build_mesh(vertices: np.ndarray, triangles: np.ndarray, n: int = 0,
               family: Optional[MeshFamily] = None) -> Mesh:
    """
    Build connectivity and geometry for a triangle list

    Args:
        vertices: (nv, 2) coordinates
        triangles: (ne, 3) vertex indices in counterclockwise order
        n: Grid division count (0 for unstructured input)
        family: Family the mesh was generated from, if any

    Returns:
        Immutable Mesh
    """
    vertices = np.array(vertices, dtype=float)
    triangles = np.array(triangles, dtype=np.int64)
    if triangles.ndim != 2 or triangles.shape[1] != 3 or len(triangles) == 0:
        raise ValueError("Need a non-empty (ne, 3) triangle array")

    ne = len(triangles)
    corners = vertices[triangles]
    e1 = corners[:, 1] - corners[:, 0]
    e2 = corners[:, 2] - corners[:, 0]
    signed = 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
    if np.any(signed <= 0.0):
        bad = int(np.argmax(signed <= 0.0))
        raise ValueError(f"Triangle {bad} is degenerate or clockwise")

    # Local edge j joins local vertices j+1 and j+2
    local_edges = np.array([[1, 2], [2, 0], [0, 1]])
    edges = triangles[:, local_edges].reshape(-1, 2)
    keys = np.sort(edges, axis=1)
    face_vertices, first, inverse = np.unique(keys, axis=0, return_index=True, return_inverse=True)
    inverse = inverse.reshape(-1)
    nf = len(face_vertices)

    slots = np.arange(3 * ne)
    cells, local = slots // 3, slots % 3
    face_cells = np.full((nf, 2), -1, dtype=np.int64)
    face_local = np.full((nf, 2), -1, dtype=np.int64)
    face_cells[inverse[first], 0] = cells[first]
    face_local[inverse[first], 0] = local[first]

    second = np.setdiff1d(slots, first, assume_unique=True)
    counts = np.bincount(inverse, minlength=nf)
    if np.any(counts > 2):
        raise ValueError("Non-manifold triangulation: a face is shared by more than two triangles")
    face_cells[inverse[second], 1] = cells[second]
    face_local[inverse[second], 1] = local[second]

    cell_faces = inverse.reshape(ne, 3)

    # Normals from the first adjacent triangle, which is the lower-indexed one
    owner_edges = edges[first]
    tangent = vertices[owner_edges[:, 1]] - vertices[owner_edges[:, 0]]
    face_lengths = np.hypot(tangent[:, 0], tangent[:, 1])
    face_normals = np.column_stack([tangent[:, 1], -tangent[:, 0]]) / face_lengths[:, None]
    face_midpoints = 0.5 * (vertices[face_vertices[:, 0]] + vertices[face_vertices[:, 1]])

    cell_signs = np.where(face_cells[cell_faces, 0] == cells.reshape(ne, 3), 1.0, -1.0)

    edge_lengths = face_lengths[cell_faces]
    diameters = edge_lengths.max(axis=1)

    face_ell = np.full((nf, 2), np.nan)
    interior = face_cells[:, 1] >= 0
    face_ell[:, 0] = 2.0 * signed[face_cells[:, 0]] / face_lengths
    face_ell[interior, 1] = 2.0 * signed[face_cells[interior, 1]] / face_lengths[interior]

    arrays = dict(
        vertices=vertices, triangles=triangles, areas=signed, diameters=diameters,
        cell_faces=cell_faces, cell_signs=cell_signs, face_vertices=face_vertices,
        face_lengths=face_lengths, face_midpoints=face_midpoints, face_normals=face_normals,
        face_cells=face_cells, face_local=face_local, face_ell=face_ell,
        interior_faces=np.flatnonzero(interior), boundary_faces=np.flatnonzero(~interior),
    )
    for value in arrays.values():
        value.setflags(write=False)

    return Mesh(h=float(diameters.max()), n=int(n), family=family, **arrays)


def generate_mesh(family: MeshFamily, n: int) -> Mesh:
    """
    Generate a tensor-grid triangulation of the unit square

    Each grid cell is split by the diagonal from its lower-left to its
    upper-right corner. Vertices are numbered row by row with x1 fastest.

    Args:
        family: Mesh family (x2 grading)
        n: Number of divisions per side

    Returns:
        Mesh with 2 n^2 triangles
    """
    family.check_divisions(n)
    x1 = np.arange(n + 1, dtype=float) / n
    x2 = family.vertical_grid(n)

    xx, yy = np.meshgrid(x1, x2)
    vertices = np.column_stack([xx.ravel(), yy.ravel()])

    jj, ii = np.meshgrid(np.arange(n), np.arange(n), indexing='ij')
    v00 = (jj * (n + 1) + ii).ravel()
    v10 = v00 + 1
    v01 = v00 + (n + 1)
    v11 = v01 + 1
    lower = np.column_stack([v00, v10, v11])
    upper = np.column_stack([v00, v11, v01])
    triangles = np.stack([lower, upper], axis=1).reshape(-1, 3)

    mesh = build_mesh(vertices, triangles, n=n, family=family)
    logger.debug("Generated %s mesh n=%d: %d triangles, %d faces, h=%.4e",
                 family, n, mesh.n_triangles, mesh.n_faces, mesh.h)
    return mesh
