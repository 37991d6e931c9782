import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Union

import pandas as pd

from analyzers.error_analyzer import ErrorReport, convergence_rate

logger = logging.getLogger(__name__)

CSV_COLUMNS = [
    'N', 'Np', 'h', 'err_h1', 'err_l2u', 'err_l2p', 'err_energy', 'err_combined',
    'rate_h1', 'rate_l2u', 'rate_l2p', 'rate_combined', 'iters', 'seconds',
]

# error column -> rate column
RATE_COLUMNS = {
    'err_h1': 'rate_h1',
    'err_l2u': 'rate_l2u',
    'err_l2p': 'rate_l2p',
    'err_combined': 'rate_combined',
}


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    nodal_points: int
    h: float
    errors: ErrorReport
    iterations: int
    residual: float
    seconds: float

    def error_columns(self) -> Dict[str, float]:
        """Relative errors as they appear in the tables"""
        return {
            'err_h1': self.errors.rel_h1,
            'err_l2u': self.errors.rel_l2u,
            'err_l2p': self.errors.rel_l2p,
            'err_energy': self.errors.rel_energy,
            'err_combined': self.errors.combined,
        }


def _safe_rate(coarse: float, fine: float) -> float:
    try:
        return convergence_rate(coarse, fine)
    except ValueError:
        return math.nan


@dataclass
class ConvergenceReport:
    """Rows ordered by N plus the settings that produced them"""

    rows: List[ConvergenceRow] = field(default_factory=list)
    metadata: Dict[str, Any] = field(default_factory=dict)

    def add_row(self, row: ConvergenceRow) -> None:
        self.rows.append(row)
        self.rows.sort(key=lambda r: r.n)

    def rates(self) -> List[Dict[str, float]]:
        """Rates between each row and its predecessor, NaN on the first row"""
        result = []
        for i, row in enumerate(self.rows):
            current = row.error_columns()
            if i == 0:
                result.append({rate: math.nan for rate in RATE_COLUMNS.values()})
                continue
            previous = self.rows[i - 1].error_columns()
            result.append({rate: _safe_rate(previous[err], current[err]) for err, rate in RATE_COLUMNS.items()})
        return result

    def to_frame(self) -> pd.DataFrame:
        records = []
        for row, rates in zip(self.rows, self.rates()):
            record = {'N': row.n, 'Np': row.nodal_points, 'h': row.h}
            record.update(row.error_columns())
            record.update(rates)
            record.update(iters=row.iterations, seconds=row.seconds)
            records.append(record)
        return pd.DataFrame.from_records(records, columns=CSV_COLUMNS)


def emit_csv(report: ConvergenceReport, path: Union[str, Path]) -> Path:
    """
    Write a convergence report as CSV

    Floats use scientific notation with 6 significant digits; the rate
    cells of the first row stay empty.

    Args:
        report: ConvergenceReport
        path: Output file

    Returns:
        Path written
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    report.to_frame().to_csv(path, index=False, float_format='%.5e', na_rep='')
    logger.info("Convergence report with %d rows written to %s", len(report.rows), path)
    return path
