"""Reference convergence studies on N up to 64 (run with -m slow)"""
import pytest

from analyzers import convergence_rate, dof_count
from app import run_experiment
from config import ExperimentConfig
from fem.spaces import Scheme
from meshing import MeshFamily, generate_mesh

pytestmark = pytest.mark.slow

LAYER_128 = 1.0 / 128.0
LAYER_1024 = 1.0 / 1024.0


def study(**settings):
    settings.setdefault('method', 'sparse-direct')
    return run_experiment(ExperimentConfig(**settings)).to_frame()


@pytest.mark.parametrize('n,wopsip,wbcr', [(16, 3584, 2112), (32, 14336, 8320), (64, 57344, 33024)])
def test_nodal_point_counts(n, wopsip, wbcr):
    mesh = generate_mesh(MeshFamily.from_name('uniform'), n)
    assert dof_count(mesh, Scheme.WOPSIP) == wopsip
    assert dof_count(mesh, Scheme.WBCR) == wbcr


@pytest.mark.parametrize('mesh,delta,coarse,fine', [
    ('uniform', None, (8.10569e-01, 2.12630e-01, 3.61598e-02), (4.08981e-01, 5.42357e-02, 1.35562e-02)),
    ('shishkin', LAYER_128, (1.15924e+00, 4.33629e-01, 6.52059e-02), (5.79411e-01, 1.08800e-01, 2.22654e-02)),
    ('cosine', None, (1.05163e+00, 3.60039e-01, 5.24322e-02), (5.34097e-01, 9.31283e-02, 1.76734e-02)),
    ('quadratic', None, (1.23942e+00, 4.97459e-01, 7.17788e-02), (6.36438e-01, 1.31655e-01, 2.44549e-02)),
])
def test_polynomial_problem_on_every_family(mesh, delta, coarse, fine):
    frame = study(scheme='wopsip', mesh=mesh, mesh_delta=delta, problem='poly', n_list=[32, 64])
    for row, expected in enumerate((coarse, fine)):
        # the reference velocity gradient errors include the jump seminorm
        measured = frame.loc[row, ['err_energy', 'err_l2u', 'err_l2p']].tolist()
        assert measured == pytest.approx(list(expected), rel=0.02)


def test_polynomial_rates_on_uniform_mesh():
    frame = study(scheme='wopsip', mesh='uniform', problem='poly', n_list=[32, 64])
    energy_rate = convergence_rate(frame.loc[0, 'err_energy'], frame.loc[1, 'err_energy'])
    assert energy_rate == pytest.approx(0.99, abs=0.05)
    assert frame.loc[1, 'rate_l2u'] == pytest.approx(1.97, abs=0.05)
    assert frame.loc[1, 'rate_l2p'] == pytest.approx(1.42, abs=0.05)


@pytest.mark.parametrize('scheme,delta,errors,rates', [
    ('wopsip', LAYER_128, (1.52245, 0.869097, 0.474478), (0.81, 0.97)),
    ('wopsip', LAYER_1024, (9.44971, 5.22725, 2.73921), None),
    ('wbcr', LAYER_128, (0.662593, 0.402491, 0.230546), (0.72, None)),
    ('wbcr', LAYER_1024, (4.22382, 2.15053, 1.09781), None),
])
def test_boundary_layer_on_shishkin_meshes(scheme, delta, errors, rates):
    frame = study(scheme=scheme, mesh='shishkin', mesh_delta=delta, problem='layer', problem_delta=delta,
                  n_list=[16, 32, 64])
    assert frame['err_combined'].tolist() == pytest.approx(list(errors), rel=0.03)
    for row, rate in enumerate(rates or (), start=1):
        if rate is not None:
            assert frame.loc[row, 'rate_combined'] == pytest.approx(rate, abs=0.1)


def test_boundary_layer_stalls_on_uniform_mesh():
    moderate = study(scheme='wopsip', mesh='uniform', problem='layer', problem_delta=LAYER_128, n_list=[16, 32])
    assert moderate.loc[1, 'rate_combined'] <= 0.3
    thin = study(scheme='wopsip', mesh='uniform', problem='layer', problem_delta=LAYER_1024, n_list=[16, 32])
    assert abs(thin.loc[1, 'rate_combined']) <= 0.1


def test_unscaled_penalty_stagnates():
    scaled = study(scheme='wopsip', penalty='kappa', mesh='uniform', problem='layer', problem_delta=1.0,
                   n_list=[16, 32, 64])
    assert scaled['err_combined'].tolist() == pytest.approx([2.83735e-01, 1.30123e-01, 6.14099e-02], rel=0.03)
    assert scaled.loc[1, 'rate_combined'] == pytest.approx(1.12, abs=0.1)
    assert scaled.loc[2, 'rate_combined'] == pytest.approx(1.08, abs=0.1)

    unscaled = study(scheme='wopsip', penalty='kappa-star', mesh='uniform', problem='layer', problem_delta=1.0,
                     n_list=[32, 64])
    errors = unscaled['err_combined'].tolist()
    assert all(1.64 <= e <= 1.70 for e in errors)
    assert abs(errors[0] - errors[1]) < 0.01
