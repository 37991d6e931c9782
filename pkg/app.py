import argparse
import logging
import sys
import time
import traceback
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import List, Optional

import pandas as pd

from analyzers.error_analyzer import error_report
from analyzers.penalty_analyzer import dof_count, inf_sup_constant, penalty_diagnostics
from config import Config, ExperimentConfig
from fem.spaces import Scheme
from meshing.export import write_mesh_text
from meshing.generator import generate_mesh
from meshing.quality import mesh_quality
from problems.manufactured import problem_by_name
from solvers.assembler import assemble
from solvers.exceptions import NonConvergenceError, SolverError
from solvers.linsolve import solve_saddle
from utils.helpers import format_failure
from utils.reporting import ConvergenceReport, ConvergenceRow, emit_csv

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_SOLVER = 2

# Largest N for which diagnose --inf-sup runs the dense probe
INF_SUP_MAX_N = 32


def run_row(config: ExperimentConfig, n: int) -> ConvergenceRow:
    """
    One row of a convergence table: mesh, assemble, solve, measure

    Args:
        config: Validated experiment settings
        n: Division count

    Returns:
        ConvergenceRow
    """
    start = time.perf_counter()
    mesh = generate_mesh(config.family, n)
    problem = problem_by_name(config.problem, config.problem_delta)
    system = assemble(mesh, problem, config.scheme, config.penalty)

    try:
        result = solve_saddle(system, config.solve_options())
    except NonConvergenceError as exc:
        raise exc.at(n) from exc

    errors = error_report(mesh, problem, result.u, result.p, config.scheme, config.penalty)
    seconds = time.perf_counter() - start
    logger.info("N=%d done in %.2fs: combined error %.5e", n, seconds, errors.combined)
    return ConvergenceRow(
        n=n, nodal_points=dof_count(mesh, config.scheme), h=mesh.h, errors=errors,
        iterations=result.iterations, residual=result.residual_norm, seconds=seconds,
    )


def run_experiment(config: ExperimentConfig) -> ConvergenceReport:
    """
    Run a convergence study over config.n_list

    Rows may be computed concurrently (config.workers > 1); the report
    is always ordered by N.

    Args:
        config: Experiment settings

    Returns:
        ConvergenceReport with rates between consecutive rows
    """
    config.validate()
    report = ConvergenceReport(metadata=config.as_dict())

    if config.workers > 1 and len(config.n_list) > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            rows = list(pool.map(lambda n: run_row(config, n), config.n_list))
    else:
        rows = [run_row(config, n) for n in config.n_list]

    for row in rows:
        report.add_row(row)
    report.metadata['residuals'] = {row.n: row.residual for row in report.rows}
    return report


def run_diagnostics(config: ExperimentConfig, inf_sup: bool = False) -> pd.DataFrame:
    """
    Mesh-quality and penalty indicators for every N of the config

    Args:
        config: Experiment settings (mesh family and N list are used)
        inf_sup: Also run the dense inf-sup probe for N <= INF_SUP_MAX_N

    Returns:
        DataFrame with one row per N
    """
    family = config.family
    records = []
    for n in config.n_list:
        mesh = generate_mesh(family, n)
        record = {'N': n}
        record.update(mesh_quality(mesh).as_dict())
        record.update(penalty_diagnostics(mesh).as_dict())
        record.update(np_wopsip=dof_count(mesh, Scheme.WOPSIP), np_wbcr=dof_count(mesh, Scheme.WBCR))
        if inf_sup:
            record['inf_sup'] = (inf_sup_constant(mesh, config.scheme, config.penalty)
                                 if n <= INF_SUP_MAX_N else float('nan'))
        records.append(record)
    return pd.DataFrame.from_records(records)


def export_meshes(config: ExperimentConfig) -> List[Path]:
    out_dir = Path(config.out or Config.OUTPUT_DIR)
    family = config.family
    written = []
    for n in config.n_list:
        mesh = generate_mesh(family, n)
        written.append(write_mesh_text(mesh, out_dir / f"mesh_{family.kind}_N{n}.txt"))
    return written


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help='key=value experiment file')
    common.add_argument('--scheme', choices=[s.value for s in Scheme])
    common.add_argument('--mesh', help='uniform | shishkin | cosine | quadratic (or I..IV)')
    common.add_argument('--delta', type=float, dest='mesh_delta', help='Shishkin layer width')
    common.add_argument('--problem', help='poly | layer')
    common.add_argument('--problem-delta', type=float, dest='problem_delta')
    common.add_argument('--n', dest='n_list', help='comma separated N values, e.g. 16,32,64')
    common.add_argument('--penalty', help='kappa | kappa-star')
    common.add_argument('--tol', type=float)
    common.add_argument('--method', help='krylov | direct | sparse-direct')
    common.add_argument('--precondition', action='store_true', default=None)
    common.add_argument('--max-iterations', type=int, dest='max_iterations')
    common.add_argument('--out', help='output file (CSV) or directory (export-mesh)')
    common.add_argument('--workers', type=int)

    parser = argparse.ArgumentParser(prog='wopsip', description='WOPSIP / WBCR Stokes convergence studies')
    commands = parser.add_subparsers(dest='command', required=True)
    commands.add_parser('converge', parents=[common], help='convergence table')
    diagnose = commands.add_parser('diagnose', parents=[common], help='mesh and penalty diagnostics')
    diagnose.add_argument('--inf-sup', action='store_true', dest='inf_sup')
    commands.add_parser('export-mesh', parents=[common], help='write meshes as plain text')
    return parser


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    base = ExperimentConfig.from_file(args.config) if args.config else ExperimentConfig()
    overrides = {
        key: getattr(args, key)
        for key in ('scheme', 'mesh', 'mesh_delta', 'problem', 'problem_delta', 'n_list', 'penalty',
                    'tol', 'method', 'precondition', 'max_iterations', 'out', 'workers')
    }
    return base.with_overrides(**overrides)


def _banner(title: str) -> None:
    print("\n" + "=" * 80)
    print(title)
    print("=" * 80)


def _print_failure(failure: dict) -> None:
    _banner("RUN FAILED")
    for key, value in failure.items():
        print(f"  {key}: {value}")
    print("=" * 80 + "\n")


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=Config.LOG_LEVEL, format="%(asctime)s %(levelname)s %(name)s: %(message)s")

    try:
        Config.validate()
        config = load_config(args)
        config.validate()
    except ValueError as exc:
        logger.debug("Configuration error\n%s", traceback.format_exc())
        _print_failure(format_failure(exc, stage='config'))
        return EXIT_CONFIG

    try:
        if args.command == 'converge':
            _banner("CONVERGENCE STUDY")
            print(f"  Scheme: {config.scheme.value}  Penalty: {config.penalty.value}")
            print(f"  Mesh: {config.family}  Problem: {config.problem}  N: {config.n_list}")
            report = run_experiment(config)
            print("\n" + report.to_frame().to_string(index=False, float_format=lambda v: f"{v:.5e}"))
            if config.out:
                path = emit_csv(report, config.out)
                print(f"\nCSV written to {path}")

        elif args.command == 'diagnose':
            _banner("MESH AND PENALTY DIAGNOSTICS")
            print(f"  Mesh: {config.family}  N: {config.n_list}")
            frame = run_diagnostics(config, inf_sup=args.inf_sup)
            print("\n" + frame.to_string(index=False, float_format=lambda v: f"{v:.5e}"))
            if config.out:
                Path(config.out).parent.mkdir(parents=True, exist_ok=True)
                frame.to_csv(config.out, index=False, float_format='%.5e', na_rep='')
                print(f"\nCSV written to {config.out}")

        else:
            _banner("MESH EXPORT")
            for path in export_meshes(config):
                print(f"  {path}")

    except SolverError as exc:
        logger.debug("Solver failure\n%s", traceback.format_exc())
        _print_failure(format_failure(exc, stage='solve'))
        return EXIT_SOLVER
    except (ValueError, OSError) as exc:
        logger.debug("Run failure\n%s", traceback.format_exc())
        _print_failure(format_failure(exc, stage='run'))
        return EXIT_CONFIG

    print("\n" + "=" * 80)
    print("DONE")
    print("=" * 80 + "\n")
    return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
