from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

Field = Callable[[np.ndarray], np.ndarray]
Derivatives = Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]]


@dataclass(frozen=True)
class Problem:
    """
    Manufactured Stokes solution on the unit square

    All callables take points of shape (..., 2). velocity and forcing
    return (..., 2), velocity_gradient returns (..., 2, 2) with
    [i, j] = d u_i / d x_j, pressure returns (...).
    """

    velocity: Field
    velocity_gradient: Field
    pressure: Field
    forcing: Field
    nu: float
    label: str
    delta: Optional[float] = None


def _bubble(t: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """t^2 (t - 1)^2 and its first three derivatives"""
    return (
        t ** 2 * (t - 1.0) ** 2,
        4.0 * t ** 3 - 6.0 * t ** 2 + 2.0 * t,
        12.0 * t ** 2 - 12.0 * t + 2.0,
        24.0 * t - 12.0,
    )


def _layer_bubble(delta: float) -> Derivatives:
    """Derivatives of q(t) exp(-t/delta) with q the bubble, exponential factored once"""
    k = 1.0 / delta

    def derivatives(t):
        q, q1, q2, q3 = _bubble(t)
        e = np.exp(-k * t)
        return (
            q * e,
            (q1 - k * q) * e,
            (q2 - 2.0 * k * q1 + k ** 2 * q) * e,
            (q3 - 3.0 * k * q2 + 3.0 * k ** 2 * q1 - k ** 3 * q) * e,
        )

    return derivatives


def _rot_problem(gx: Derivatives, hy: Derivatives, pressure: Field, pressure_gradient: Field,
                 nu: float, label: str, delta: Optional[float] = None) -> Problem:
    """Problem for u = rot(g(x1) h(x2)), i.e. u1 = g h', u2 = -g' h"""

    def velocity(x):
        g, g1, _, _ = gx(x[..., 0])
        h, h1, _, _ = hy(x[..., 1])
        return np.stack([g * h1, -g1 * h], axis=-1)

    def velocity_gradient(x):
        g, g1, g2, _ = gx(x[..., 0])
        h, h1, h2, _ = hy(x[..., 1])
        row1 = np.stack([g1 * h1, g * h2], axis=-1)
        row2 = np.stack([-g2 * h, -g1 * h1], axis=-1)
        return np.stack([row1, row2], axis=-2)

    def forcing(x):
        g, g1, g2, g3 = gx(x[..., 0])
        h, h1, h2, h3 = hy(x[..., 1])
        laplace = np.stack([g2 * h1 + g * h3, -(g3 * h + g1 * h2)], axis=-1)
        return -nu * laplace + pressure_gradient(x)

    return Problem(velocity, velocity_gradient, pressure, forcing, nu, label, delta)


def polynomial_problem(nu: float = 1.0) -> Problem:
    """
    Smooth test: stream function x1^2 (x1-1)^2 x2^2 (x2-1)^2, p = x1^2 - x2^2

    Returns:
        Problem labelled 'poly'
    """
    def pressure(x):
        return x[..., 0] ** 2 - x[..., 1] ** 2

    def pressure_gradient(x):
        return np.stack([2.0 * x[..., 0], -2.0 * x[..., 1]], axis=-1)

    return _rot_problem(_bubble, _bubble, pressure, pressure_gradient, nu, 'poly')


def boundary_layer_problem(delta: float, nu: float = 1.0) -> Problem:
    """
    Boundary layer of width delta at x2 = 0

    Stream function x1^2 (x1-1)^2 x2^2 (x2-1)^2 exp(-x2/delta) and
    p = exp(-x2/delta) - delta + delta exp(-1/delta), which has zero mean.

    Args:
        delta: Layer width, positive
        nu: Viscosity

    Returns:
        Problem labelled 'layer'
    """
    if delta is None or not delta > 0.0:
        raise ValueError(f"Boundary layer width must be positive, got {delta}")
    k = 1.0 / delta
    shift = -delta + delta * np.exp(-k)

    def pressure(x):
        return np.exp(-k * x[..., 1]) + shift

    def pressure_gradient(x):
        e = np.exp(-k * x[..., 1])
        return np.stack([np.zeros_like(e), -k * e], axis=-1)

    return _rot_problem(_bubble, _layer_bubble(delta), pressure, pressure_gradient, nu, 'layer', delta)


def problem_by_name(name: str, delta: Optional[float] = None, nu: float = 1.0) -> Problem:
    """Select a problem by its CLI name ('poly' or 'layer')"""
    key = str(name).strip().lower()
    if key in ('poly', 'polynomial'):
        return polynomial_problem(nu)
    if key in ('layer', 'boundary-layer', 'boundary_layer'):
        return boundary_layer_problem(delta, nu)
    raise ValueError(f"Unknown problem: {name}")
