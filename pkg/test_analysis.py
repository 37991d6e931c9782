import math

import numpy as np
import pytest

from analyzers import (ErrorAnalyzer, convergence_rate, discrete_energy_norm, dof_count, error_report,
                       inf_sup_constant, penalty_diagnostics)
from conftest import forcing_only_problem
from fem.spaces import DofMap, Scheme, global_interpolate_cr, l2_project_cells
from meshing import MeshFamily, generate_mesh
from problems import polynomial_problem
from solvers import PenaltyMode, penalty_weights


def test_convergence_rate():
    assert convergence_rate(4.0, 1.0) == pytest.approx(2.0)
    assert convergence_rate(0.810569, 0.408981) == pytest.approx(0.99, abs=5e-3)
    assert convergence_rate(1.52245, 0.869097) == pytest.approx(0.81, abs=5e-3)


@pytest.mark.parametrize('coarse,fine', [(0.0, 1.0), (1.0, 0.0), (-1.0, 0.5), (float('nan'), 1.0)])
def test_convergence_rate_rejects_nonpositive(coarse, fine):
    with pytest.raises(ValueError):
        convergence_rate(coarse, fine)


@pytest.mark.parametrize('n,inverse_h,tau_f,tau_ave,tau_wop', [
    (16, 7.2179, 7.3866e+02, 3.6942e+02, 1.9246e+04),
    (64, None, None, None, 8.2860e+05),
])
def test_penalty_diagnostics_on_thin_layer(n, inverse_h, tau_f, tau_ave, tau_wop):
    diagnostics = penalty_diagnostics(generate_mesh(MeshFamily.from_name('shishkin', 1.0 / 1024.0), n))
    assert diagnostics.tau_wop == pytest.approx(tau_wop, rel=1e-3)
    if inverse_h is not None:
        assert diagnostics.inverse_h == pytest.approx(inverse_h, rel=1e-4)
        assert diagnostics.tau_f == pytest.approx(tau_f, rel=1e-4)
        assert diagnostics.tau_ave == pytest.approx(tau_ave, rel=1e-4)
        assert diagnostics.tau_dg == pytest.approx(tau_ave, rel=1e-4)


def test_penalty_diagnostics_relations(shishkin_mesh_8):
    diagnostics = penalty_diagnostics(shishkin_mesh_8)
    assert diagnostics.tau_wop * shishkin_mesh_8.h ** 2 == pytest.approx(diagnostics.tau_dg, rel=1e-13)
    # (1/l1 + 1/l2)/4 >= 2/(sqrt(l1) + sqrt(l2))^2 face by face
    assert diagnostics.tau_ave >= diagnostics.tau_dg * (1.0 - 1e-12)
    assert set(diagnostics.as_dict()) == {'inverse_h', 'tau_f', 'tau_ave', 'tau_dg', 'tau_wop'}


def test_penalty_diagnostics_scale_on_uniform_meshes(uniform):
    coarse = penalty_diagnostics(generate_mesh(uniform, 8))
    fine = penalty_diagnostics(generate_mesh(uniform, 16))
    assert fine.tau_f / coarse.tau_f == pytest.approx(2.0)
    assert fine.tau_dg / coarse.tau_dg == pytest.approx(2.0)
    assert fine.tau_wop / coarse.tau_wop == pytest.approx(8.0)


@pytest.mark.parametrize('n', [4, 8, 16, 32])
def test_average_penalty_grows_like_n(uniform, n):
    # diagonals have l = 1/(sqrt(2) N) on both sides, legs only 1/N
    assert penalty_diagnostics(generate_mesh(uniform, n)).tau_ave == pytest.approx(n / math.sqrt(2.0), rel=1e-12)


def test_diagnostics_follow_assembled_penalty(shishkin_mesh_8):
    mesh = shishkin_mesh_8
    diagnostics = penalty_diagnostics(mesh)
    interior = mesh.interior_faces
    assert diagnostics.tau_wop == pytest.approx(penalty_weights(mesh, PenaltyMode.KAPPA)[interior].max(), rel=1e-13)
    assert diagnostics.tau_dg == pytest.approx(penalty_weights(mesh, PenaltyMode.KAPPA_STAR)[interior].max(),
                                               rel=1e-13)


def test_dof_counts(uniform):
    mesh = generate_mesh(uniform, 16)
    assert dof_count(mesh, Scheme.WOPSIP) == 3584
    assert dof_count(mesh, 'wbcr') == 2112
    assert dof_count(generate_mesh(uniform, 64), Scheme.WBCR) == 33024


def test_exact_norms_of_polynomial_solution(uniform_mesh_8):
    norms = ErrorAnalyzer(uniform_mesh_8, polynomial_problem(), Scheme.WOPSIP).exact_norms()
    assert norms['h1'] == pytest.approx(math.sqrt(4.0 / 1225.0), rel=1e-8)
    assert norms['l2u'] == pytest.approx(math.sqrt(2.0 / 33075.0), rel=1e-8)
    assert norms['l2p'] == pytest.approx(math.sqrt(8.0 / 45.0), rel=1e-12)


def test_zero_solution_has_unit_relative_errors(uniform_mesh_8):
    mesh = uniform_mesh_8
    report = error_report(mesh, polynomial_problem(), np.zeros(6 * mesh.n_triangles),
                          np.zeros(mesh.n_triangles), Scheme.WOPSIP)
    assert report.jump == 0.0
    assert report.rel_h1 == pytest.approx(1.0)
    assert report.rel_l2u == pytest.approx(1.0)
    assert report.rel_l2p == pytest.approx(1.0)
    assert report.combined == pytest.approx(1.0)


def test_interpolant_errors(uniform):
    mesh = generate_mesh(uniform, 8)
    problem = polynomial_problem()
    p = l2_project_cells(mesh, problem.pressure)
    for scheme in (Scheme.WOPSIP, Scheme.WBCR):
        u = global_interpolate_cr(mesh, problem.velocity, scheme)
        report = error_report(mesh, problem, u, p, scheme)
        assert report.jump <= 1e-10
        assert 0.0 < report.rel_h1 < 0.5
        assert report.energy == pytest.approx(math.hypot(report.err_h1, report.jump))


def test_zero_problem_has_undefined_relative_errors(uniform_mesh_4):
    mesh = uniform_mesh_4
    problem = forcing_only_problem(lambda x: np.zeros(x.shape))
    report = error_report(mesh, problem, np.zeros(6 * mesh.n_triangles), np.zeros(mesh.n_triangles), Scheme.WOPSIP)
    assert report.err_h1 == 0.0 and report.err_l2u == 0.0 and report.err_l2p == 0.0
    assert math.isnan(report.combined)


def test_energy_error_matches_discrete_norm(shishkin_mesh_8, rng):
    """With a zero exact velocity the energy error is the discrete norm of u_h"""
    mesh = shishkin_mesh_8
    problem = forcing_only_problem(lambda x: np.zeros(x.shape))
    u = rng.normal(size=DofMap(mesh, Scheme.WOPSIP).n_velocity)
    for mode in (PenaltyMode.KAPPA, PenaltyMode.KAPPA_STAR):
        report = ErrorAnalyzer(mesh, problem, Scheme.WOPSIP, mode).analyze_solution(u, np.zeros(mesh.n_triangles))
        assert report.energy ** 2 == pytest.approx(discrete_energy_norm(mesh, u, mode), rel=1e-12)


def test_wbcr_has_no_jump_term(uniform_mesh_4, rng):
    u = rng.normal(size=DofMap(uniform_mesh_4, Scheme.WBCR).n_velocity)
    report = error_report(uniform_mesh_4, polynomial_problem(), u, np.zeros(uniform_mesh_4.n_triangles), Scheme.WBCR)
    assert report.jump == 0.0
    assert report.energy == report.err_h1


def test_rejects_mismatched_vectors(uniform_mesh_4):
    analyzer = ErrorAnalyzer(uniform_mesh_4, polynomial_problem(), Scheme.WOPSIP)
    with pytest.raises(ValueError, match='Pressure'):
        analyzer.analyze_solution(np.zeros(6 * uniform_mesh_4.n_triangles), np.zeros(3))
    with pytest.raises(ValueError, match='Velocity'):
        analyzer.analyze_solution(np.zeros(5), np.zeros(uniform_mesh_4.n_triangles))


def test_report_as_dict(uniform_mesh_4):
    mesh = uniform_mesh_4
    problem = polynomial_problem()
    report = error_report(mesh, problem, global_interpolate_cr(mesh, problem.velocity, Scheme.WOPSIP),
                          l2_project_cells(mesh, problem.pressure), Scheme.WOPSIP)
    data = report.as_dict()
    assert data['combined'] == report.combined
    assert {'err_h1', 'jump', 'energy', 'rel_l2u', 'rel_l2p'} <= set(data)


@pytest.mark.parametrize('scheme', [Scheme.WOPSIP, Scheme.WBCR])
def test_inf_sup_constant_is_bounded_below(scheme, uniform):
    """
    The CR interpolant is a Fortin operator of norm one for both schemes, so
    beta_h stays above the continuous constant of the unit square (about
    0.38) while it settles from above on coarse meshes.
    """
    betas = [inf_sup_constant(generate_mesh(uniform, n), scheme) for n in (4, 8, 16)]
    assert min(betas) >= 0.3
    assert max(betas) <= math.sqrt(2.0)
    assert betas[-1] <= betas[0]


def test_inf_sup_rejects_large_meshes(uniform):
    with pytest.raises(ValueError, match='limited'):
        inf_sup_constant(generate_mesh(uniform, 48), Scheme.WOPSIP)
