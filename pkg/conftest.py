import numpy as np
import pytest

from meshing.generator import MeshFamily, build_mesh, generate_mesh
from problems import Problem


def pytest_configure(config):
    config.addinivalue_line('markers', 'slow: long table reproductions (deselect with -m "not slow")')


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope='session')
def uniform():
    return MeshFamily.from_name('uniform')


@pytest.fixture(scope='session')
def uniform_mesh_2(uniform):
    return generate_mesh(uniform, 2)


@pytest.fixture(scope='session')
def uniform_mesh_4(uniform):
    return generate_mesh(uniform, 4)


@pytest.fixture(scope='session')
def uniform_mesh_8(uniform):
    return generate_mesh(uniform, 8)


@pytest.fixture(scope='session')
def shishkin_mesh_8():
    return generate_mesh(MeshFamily.from_name('shishkin', 1.0 / 128.0), 8)


@pytest.fixture(scope='session')
def reference_mesh():
    """Single triangle (0,0), (1,0), (0,1)"""
    return build_mesh([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], [[0, 1, 2]])


def random_triangle_mesh(rng):
    """One random counterclockwise triangle of reasonable shape"""
    while True:
        corners = rng.uniform(-1.0, 1.0, size=(3, 2))
        e1, e2 = corners[1] - corners[0], corners[2] - corners[0]
        signed = 0.5 * (e1[0] * e2[1] - e1[1] * e2[0])
        if abs(signed) > 0.05:
            break
    if signed < 0.0:
        corners = corners[[0, 2, 1]]
    return build_mesh(corners, [[0, 1, 2]])


def find_face(mesh, midpoint):
    """Face id whose midpoint is the given point"""
    distance = np.linalg.norm(mesh.face_midpoints - np.asarray(midpoint), axis=1)
    face_id = int(np.argmin(distance))
    assert distance[face_id] < 1e-12
    return face_id


def forcing_only_problem(forcing, nu=1.0):
    """Problem with zero velocity and pressure, only the load is meaningful"""
    def zero_vector(x):
        return np.zeros(x.shape)

    def zero_matrix(x):
        return np.zeros(x.shape[:-1] + (2, 2))

    def zero_scalar(x):
        return np.zeros(x.shape[:-1])

    return Problem(zero_vector, zero_matrix, zero_scalar, forcing, nu, 'forcing-only')
