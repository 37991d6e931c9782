import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from dotenv import dotenv_values, load_dotenv

from fem.spaces import Scheme
from meshing.generator import MeshFamily
from problems.manufactured import problem_by_name
from solvers.linsolve import SolveMethod, SolveOptions
from solvers.penalty import PenaltyMode
from utils.helpers import parse_n_list

load_dotenv()


def _flag(value: Any) -> bool:
    return str(value).strip().lower() in ('1', 'true', 'yes', 'on')


class Config:
    """Application configuration"""

    # Logging
    LOG_LEVEL = os.getenv('WOPSIP_LOG_LEVEL', 'INFO').upper()

    # Solver defaults
    SOLVER_TOL = float(os.getenv('WOPSIP_SOLVER_TOL', 1e-10))
    SOLVER_METHOD = os.getenv('WOPSIP_SOLVER_METHOD', 'krylov')
    PRECONDITION = _flag(os.getenv('WOPSIP_PRECONDITION', 'False'))

    # Runner settings
    OUTPUT_DIR = os.getenv('WOPSIP_OUTPUT_DIR', 'results')
    MAX_WORKERS = int(os.getenv('WOPSIP_MAX_WORKERS', 1))
    DENSE_LIMIT = int(os.getenv('WOPSIP_DENSE_LIMIT', 20000))

    @staticmethod
    def validate():
        """Validate the environment defaults"""
        problems = []
        if Config.LOG_LEVEL not in ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'):
            problems.append(f"WOPSIP_LOG_LEVEL={Config.LOG_LEVEL}")
        if not 0.0 < Config.SOLVER_TOL < 1.0:
            problems.append(f"WOPSIP_SOLVER_TOL={Config.SOLVER_TOL}")
        try:
            SolveMethod.parse(Config.SOLVER_METHOD)
        except ValueError:
            problems.append(f"WOPSIP_SOLVER_METHOD={Config.SOLVER_METHOD}")
        if Config.MAX_WORKERS < 1:
            problems.append(f"WOPSIP_MAX_WORKERS={Config.MAX_WORKERS}")
        if Config.DENSE_LIMIT < 1:
            problems.append(f"WOPSIP_DENSE_LIMIT={Config.DENSE_LIMIT}")

        if problems:
            raise ValueError(f"Invalid configuration: {', '.join(problems)}")

        return True


# key=value spellings accepted in experiment files
_FILE_KEYS = {
    'scheme': 'scheme', 'penalty': 'penalty', 'mesh': 'mesh', 'delta': 'mesh_delta',
    'mesh_delta': 'mesh_delta', 'problem': 'problem', 'problem_delta': 'problem_delta',
    'n': 'n_list', 'n_list': 'n_list', 'tol': 'tol', 'method': 'method',
    'precondition': 'precondition', 'max_iterations': 'max_iterations', 'out': 'out',
    'workers': 'workers',
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Settings of one convergence study"""

    scheme: Scheme = Scheme.WOPSIP
    penalty: PenaltyMode = PenaltyMode.KAPPA
    mesh: str = 'uniform'
    mesh_delta: Optional[float] = None
    problem: str = 'poly'
    problem_delta: Optional[float] = None
    n_list: List[int] = field(default_factory=lambda: [8, 16, 32])
    tol: float = field(default_factory=lambda: Config.SOLVER_TOL)
    method: SolveMethod = field(default_factory=lambda: SolveMethod.parse(Config.SOLVER_METHOD))
    precondition: bool = field(default_factory=lambda: Config.PRECONDITION)
    max_iterations: Optional[int] = None
    out: Optional[str] = None
    workers: int = field(default_factory=lambda: Config.MAX_WORKERS)

    def __post_init__(self):
        object.__setattr__(self, 'scheme', Scheme.parse(self.scheme))
        object.__setattr__(self, 'penalty', PenaltyMode.parse(self.penalty))
        object.__setattr__(self, 'method', SolveMethod.parse(self.method))
        object.__setattr__(self, 'n_list', parse_n_list(self.n_list))

    @classmethod
    def from_mapping(cls, values: Dict[str, Any]) -> 'ExperimentConfig':
        """Build from string values as found in experiment files"""
        kwargs = {}
        for key, raw in values.items():
            name = _FILE_KEYS.get(key.strip().lower())
            if name is None:
                raise ValueError(f"Unknown experiment setting: {key}")
            if raw is None or str(raw).strip() == '':
                continue
            kwargs[name] = cls._convert(name, str(raw).strip())
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> 'ExperimentConfig':
        """Read a flat key=value experiment file"""
        path = Path(path)
        if not path.is_file():
            raise ValueError(f"Experiment file not found: {path}")
        return cls.from_mapping(dotenv_values(path))

    @staticmethod
    def _convert(name: str, raw: str) -> Any:
        try:
            if name in ('mesh_delta', 'problem_delta', 'tol'):
                return float(raw)
            if name in ('max_iterations', 'workers'):
                return int(raw)
        except ValueError:
            raise ValueError(f"Invalid value for {name}: {raw!r}") from None
        if name == 'precondition':
            return _flag(raw)
        return raw

    def with_overrides(self, **overrides: Any) -> 'ExperimentConfig':
        """Copy with every non-None override applied"""
        known = {f.name for f in fields(self)}
        unknown = set(overrides) - known
        if unknown:
            raise ValueError(f"Unknown experiment settings: {', '.join(sorted(unknown))}")
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})

    @property
    def family(self) -> MeshFamily:
        return MeshFamily.from_name(self.mesh, self.mesh_delta)

    def solve_options(self) -> SolveOptions:
        return SolveOptions(rel_tolerance=self.tol, max_iterations=self.max_iterations,
                            method=self.method, precondition=self.precondition,
                            dense_limit=Config.DENSE_LIMIT)

    def validate(self) -> bool:
        """
        Check the settings before any mesh is built

        Raises:
            ValueError: listing every problem found
        """
        problems = []
        try:
            family = self.family
        except ValueError as exc:
            problems.append(str(exc))
            family = None

        if any(b <= a for a, b in zip(self.n_list, self.n_list[1:])):
            problems.append(f"N values must be strictly increasing, got {self.n_list}")
        if family is not None:
            for n in self.n_list:
                try:
                    family.check_divisions(n)
                except ValueError as exc:
                    problems.append(str(exc))

        try:
            problem_by_name(self.problem, self.problem_delta)
        except ValueError as exc:
            problems.append(str(exc))
        try:
            self.solve_options()
        except ValueError as exc:
            problems.append(str(exc))
        if self.workers < 1:
            problems.append(f"workers must be >= 1, got {self.workers}")

        if problems:
            raise ValueError(f"Invalid experiment configuration: {'; '.join(problems)}")
        return True

    def as_dict(self) -> Dict[str, Any]:
        data = {f.name: getattr(self, f.name) for f in fields(self)}
        for key in ('scheme', 'penalty', 'method'):
            data[key] = data[key].value
        return data
