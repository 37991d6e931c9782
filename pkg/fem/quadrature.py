import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Tuple

import numpy as np
from scipy.special import roots_jacobi

from meshing.generator import Face, Mesh, Triangle

SUPPORTED_DEGREES = (2, 5, 10)


@dataclass(frozen=True, eq=False)
class QuadRule:
    """Quadrature rule on a triangle in barycentric coordinates, weights sum to 1"""

    points: np.ndarray
    weights: np.ndarray
    exact_degree: int

    def map_points(self, corners: np.ndarray) -> np.ndarray:
        """
        Map the barycentric points onto triangles

        Args:
            corners: (..., 3, 2) vertex coordinates

        Returns:
            (..., nq, 2) physical points
        """
        return np.einsum('qk,...kd->...qd', self.points, corners)


@dataclass(frozen=True, eq=False)
class EdgeRule:
    """Gauss rule on [0, 1], weights sum to 1"""

    points: np.ndarray
    weights: np.ndarray
    exact_degree: int


def _strang_fix_degree2() -> QuadRule:
    a, b = 1.0 / 6.0, 2.0 / 3.0
    points = np.array([[b, a, a], [a, b, a], [a, a, b]])
    weights = np.full(3, 1.0 / 3.0)
    return QuadRule(points, weights, 2)


def _radon_degree5() -> QuadRule:
    # 7-point rule, degree of precision 5
    r15 = np.sqrt(15.0)
    a1 = (6.0 - r15) / 21.0
    a2 = (6.0 + r15) / 21.0
    w1 = (155.0 - r15) / 1200.0
    w2 = (155.0 + r15) / 1200.0
    b1, b2 = 1.0 - 2.0 * a1, 1.0 - 2.0 * a2
    third = 1.0 / 3.0

    points = np.array([
        [third, third, third],
        [b1, a1, a1], [a1, b1, a1], [a1, a1, b1],
        [b2, a2, a2], [a2, b2, a2], [a2, a2, b2],
    ])
    weights = np.array([9.0 / 40.0, w1, w1, w1, w2, w2, w2])
    return QuadRule(points, weights, 5)


def _collapsed_gauss_jacobi(degree: int) -> QuadRule:
    """Conical product rule averaged over the six vertex permutations"""
    n = (degree + 2) // 2
    t, wt = np.polynomial.legendre.leggauss(n)
    xi, w_xi = 0.5 * (t + 1.0), 0.5 * wt
    s, ws = roots_jacobi(n, 1.0, 0.0)
    eta, w_eta = 0.5 * (s + 1.0), 0.25 * ws

    x = xi[:, None] * (1.0 - eta[None, :])
    y = np.broadcast_to(eta[None, :], x.shape)
    # area of the reference triangle is 1/2
    w = 2.0 * (w_xi[:, None] * w_eta[None, :])

    bary = np.stack([1.0 - x - y, x, y], axis=-1).reshape(-1, 3)
    perms = list(itertools.permutations(range(3)))
    points = np.vstack([bary[:, list(p)] for p in perms])
    weights = np.tile(w.ravel(), len(perms)) / len(perms)
    return QuadRule(points, weights, 2 * n - 1)


@lru_cache(maxsize=None)
def triangle_rule(degree: int) -> QuadRule:
    """
    Symmetric positive-weight triangle rule

    Args:
        degree: 2, 5 or 10

    Returns:
        QuadRule with exact_degree >= degree
    """
    if degree == 2:
        rule = _strang_fix_degree2()
    elif degree == 5:
        rule = _radon_degree5()
    elif degree == 10:
        rule = _collapsed_gauss_jacobi(10)
    else:
        raise ValueError(f"Unsupported quadrature degree {degree}; choose one of {SUPPORTED_DEGREES}")

    rule.points.setflags(write=False)
    rule.weights.setflags(write=False)
    return rule


@lru_cache(maxsize=None)
def edge_rule(npoints: int = 3) -> EdgeRule:
    t, w = np.polynomial.legendre.leggauss(npoints)
    points, weights = 0.5 * (t + 1.0), 0.5 * w
    points.setflags(write=False)
    weights.setflags(write=False)
    return EdgeRule(points, weights, 2 * npoints - 1)


def integrate_on_triangle(f: Callable[[np.ndarray], np.ndarray], triangle: Triangle, rule: QuadRule) -> float:
    """
    Integrate a scalar field over one triangle

    Args:
        f: Vectorized function of (nq, 2) points
        triangle: Triangle view
        rule: Quadrature rule

    Returns:
        sum_q w_q f(x_q) |T|
    """
    points = rule.map_points(triangle.corners)
    return float(np.dot(rule.weights, f(points)) * triangle.area)


def edge_points(endpoints: np.ndarray, rule: EdgeRule = None) -> np.ndarray:
    """Gauss points on segments, endpoints (..., 2, 2) -> (..., nq, 2)"""
    rule = rule or edge_rule()
    a = endpoints[..., 0, :]
    b = endpoints[..., 1, :]
    return a[..., None, :] + rule.points[:, None] * (b - a)[..., None, :]


def edge_average(g: Callable[[np.ndarray], np.ndarray], endpoints: np.ndarray) -> np.ndarray:
    """
    Face average (1/|F|) int_F g ds with the 3-point Gauss rule

    Args:
        g: Vectorized function of (..., 2) points, scalar or vector valued
        endpoints: (..., 2, 2) segment endpoints

    Returns:
        Averages, shape (...) or (..., k) for vector-valued g
    """
    rule = edge_rule()
    values = np.asarray(g(edge_points(endpoints, rule)))
    nbatch = endpoints.ndim - 2
    # move the quadrature axis to the front for the weighted sum
    values = np.moveaxis(values, nbatch, 0)
    return np.tensordot(rule.weights, values, axes=(0, 0))


def edge_midpoint_value(g: Callable[[np.ndarray], np.ndarray], face: Face, affine: bool = True) -> np.ndarray:
    """
    Pi_F^0 of a trace: midpoint value for affine g, Gauss average otherwise

    Args:
        g: Function of (..., 2) points
        face: Face view
        affine: Whether g is affine along the face

    Returns:
        Face average of g
    """
    if affine:
        return np.asarray(g(face.midpoint[None, :]))[0]
    return edge_average(g, face.endpoints)


def cell_quadrature(mesh: Mesh, rule: QuadRule) -> Tuple[np.ndarray, np.ndarray]:
    """
    Quadrature points and area-scaled weights on every triangle

    Returns:
        points (ne, nq, 2), weights (ne, nq)
    """
    points = rule.map_points(mesh.cell_corners)
    weights = mesh.areas[:, None] * rule.weights[None, :]
    return points, weights
