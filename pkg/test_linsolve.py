from dataclasses import replace

import numpy as np
import pytest
import scipy.sparse as sp

from analyzers.error_analyzer import error_report
from fem.spaces import Scheme
from meshing import build_mesh, generate_mesh
from problems import polynomial_problem
from solvers import (NonConvergenceError, SingularSystemError, SolveMethod, SolveOptions, assemble,
                     direct_oracle, solve_saddle)
from solvers.linsolve import block_preconditioner

SPARSE = SolveOptions(method=SolveMethod.SPARSE_DIRECT)


def manufactured_system(mesh, scheme, rng, nu=1.0):
    """System whose discrete solution is a known random pair"""
    system = assemble(mesh, polynomial_problem(nu=nu), scheme)
    u = rng.normal(size=system.n_velocity)
    u[system.dof_map.constrained_velocity()] = 0.0
    p = rng.normal(size=system.n_pressure)
    p -= np.dot(system.pressure_mean, p) / system.pressure_mean.sum()
    rhs = nu * (system.A @ u) + system.B.T @ p
    return system.with_rhs(rhs, system.B @ u), u, p


@pytest.mark.parametrize('scheme', [Scheme.WOPSIP, Scheme.WBCR])
def test_recovers_manufactured_pair(scheme, uniform_mesh_4, rng):
    system, u, p = manufactured_system(uniform_mesh_4, scheme, rng, nu=0.5)

    direct = solve_saddle(system, SPARSE)
    assert np.allclose(direct.u, u, atol=1e-8)
    assert np.allclose(direct.p, p, atol=1e-8)
    assert direct.multiplier == pytest.approx(0.0, abs=1e-8)

    dense = direct_oracle(system)
    assert np.allclose(dense.u, u, atol=1e-8)

    krylov = solve_saddle(system, SolveOptions(rel_tolerance=1e-12))
    assert krylov.residual_norm <= 1e-12
    assert np.allclose(krylov.u, u, atol=1e-6)
    assert np.allclose(krylov.p, p, atol=1e-6)


def test_krylov_agrees_with_direct(uniform_mesh_8):
    system = assemble(uniform_mesh_8, polynomial_problem(), Scheme.WOPSIP)
    reference = direct_oracle(system)
    result = solve_saddle(system, SolveOptions(rel_tolerance=1e-11))

    assert result.iterations > 0
    assert result.residual_norm <= 1e-11
    assert np.linalg.norm(result.u - reference.u) <= 1e-5 * np.linalg.norm(reference.u)
    assert np.linalg.norm(result.p - reference.p) <= 1e-5 * np.linalg.norm(reference.p)


def test_preconditioned_krylov(uniform_mesh_8):
    system = assemble(uniform_mesh_8, polynomial_problem(), Scheme.WBCR)
    reference = solve_saddle(system, SPARSE)
    result = solve_saddle(system, SolveOptions(rel_tolerance=1e-11, precondition=True))
    assert result.residual_norm <= 1e-11
    assert np.linalg.norm(result.u - reference.u) <= 1e-5 * np.linalg.norm(reference.u)


@pytest.mark.parametrize('precondition', [False, True])
def test_krylov_reaches_default_tolerance_on_true_residual(precondition, uniform_mesh_8):
    """MINRES' own stopping test is looser than ||b - Kx|| / ||b|| under a large penalty"""
    system = assemble(uniform_mesh_8, polynomial_problem(), Scheme.WOPSIP)
    result = solve_saddle(system, SolveOptions(precondition=precondition))
    reference = solve_saddle(system, SPARSE)
    assert result.iterations > 0
    assert result.residual_norm <= 1e-10
    assert np.linalg.norm(result.u - reference.u) <= 1e-5 * np.linalg.norm(reference.u)


def test_block_preconditioner_is_positive(uniform_mesh_4):
    system = assemble(uniform_mesh_4, polynomial_problem(nu=2.0), Scheme.WOPSIP)
    M = block_preconditioner(system)
    diagonal = M.diagonal()
    assert diagonal.shape == (system.n_unknowns,)
    assert np.all(diagonal > 0.0)
    assert diagonal[-1] == 1.0
    assert diagonal[system.n_velocity] == pytest.approx(2.0 / uniform_mesh_4.areas[0])


def test_zero_rhs_returns_zero(uniform_mesh_4):
    system = assemble(uniform_mesh_4, polynomial_problem(), Scheme.WOPSIP)
    result = solve_saddle(system.with_rhs(np.zeros(system.n_velocity)))
    assert result.iterations == 0
    assert result.residual_norm == 0.0
    assert not result.u.any() and not result.p.any()


@pytest.mark.parametrize('method', ['krylov', 'direct', 'sparse-direct'])
def test_pressure_has_zero_mean(method, shishkin_mesh_8):
    system = assemble(shishkin_mesh_8, polynomial_problem(), Scheme.WOPSIP)
    result = solve_saddle(system, SolveOptions(method=method))
    assert abs(np.dot(system.pressure_mean, result.p)) <= 1e-12


def test_budget_exhaustion_raises(uniform_mesh_4):
    system = assemble(uniform_mesh_4, polynomial_problem(), Scheme.WOPSIP)
    with pytest.raises(NonConvergenceError) as info:
        solve_saddle(system, SolveOptions(max_iterations=1))
    assert info.value.iterations <= 1
    assert info.value.residual > 1e-10
    tagged = info.value.at(4)
    assert tagged.n == 4 and 'N=4' in str(tagged)


def test_singular_system_raises(uniform_mesh_2):
    system = assemble(uniform_mesh_2, polynomial_problem(), Scheme.WOPSIP)
    broken = replace(system, A=sp.csr_matrix(system.A.shape))
    with pytest.raises(SingularSystemError):
        direct_oracle(broken)


def test_dense_limit(uniform_mesh_4):
    system = assemble(uniform_mesh_4, polynomial_problem(), Scheme.WOPSIP)
    with pytest.raises(ValueError, match='Dense oracle'):
        solve_saddle(system, SolveOptions(method='direct', dense_limit=10))


def test_triangle_renumbering_does_not_change_errors(uniform, rng):
    mesh = generate_mesh(uniform, 4)
    order = rng.permutation(mesh.n_triangles)
    shift = rng.integers(0, 3, size=mesh.n_triangles)
    triangles = np.array([np.roll(tri, s) for tri, s in zip(mesh.triangles[order], shift)])
    renumbered = build_mesh(mesh.vertices, triangles, n=mesh.n, family=mesh.family)

    problem = polynomial_problem()
    reports = []
    for m in (mesh, renumbered):
        for scheme in (Scheme.WOPSIP, Scheme.WBCR):
            result = solve_saddle(assemble(m, problem, scheme), SPARSE)
            reports.append(error_report(m, problem, result.u, result.p, scheme))
    for original, permuted in zip(reports[:2], reports[2:]):
        assert permuted.combined == pytest.approx(original.combined, rel=1e-10)
        assert permuted.err_l2u == pytest.approx(original.err_l2u, rel=1e-10)


def test_result_unpacks_to_four_values(uniform_mesh_2):
    system = assemble(uniform_mesh_2, polynomial_problem(), Scheme.WOPSIP)
    u, p, residual, iterations = solve_saddle(system, SPARSE)
    assert u.shape == (system.n_velocity,)
    assert p.shape == (system.n_pressure,)
    assert residual < 1e-12
    assert iterations == 0


@pytest.mark.parametrize('kwargs', [
    {'rel_tolerance': 0.0},
    {'rel_tolerance': 1.5},
    {'max_iterations': 0},
    {'method': 'cholesky'},
    {'dense_limit': 0},
])
def test_invalid_options(kwargs):
    with pytest.raises(ValueError):
        SolveOptions(**kwargs)


def test_method_aliases():
    assert SolveOptions(method='minres').method is SolveMethod.KRYLOV
    assert SolveOptions(method='spsolve').method is SolveMethod.SPARSE_DIRECT
    assert SolveOptions().iteration_budget(100) == 5000
    assert SolveOptions(max_iterations=7).iteration_budget(100) == 7
