"""
Sweep Runner for the HOPS simulator
Evaluates closed forms (and optionally the Fock oracle) over a (kt, Delta_h)
grid and writes a deterministic CSV surface
"""
import csv
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np

from analytic_moments import (
    HopsInput,
    VarianceSource,
    critical_time,
    degree_hidden,
    hidden_moments,
    hidden_variances,
    inequality_margins,
    oracle_moments,
    oracle_state,
    squeezing_function,
)
from dynamics import bogoliubov
from config import (
    COHERENT_TAIL_LIMIT,
    DEFAULT_N_MAX,
    DEFAULT_SWEEP_OUTPUTS,
    DEFAULT_WORKERS,
    DENSE_N_MAX_LIMIT,
    FLOAT_FORMAT,
    MAX_COUPLING_TIME,
    ORACLE_COLUMNS,
    ORACLE_COUPLING,
    SWEEP_COLUMN_GROUPS,
    SWEEP_OUTPUTS,
)
from errors import HopsError, InvalidConfigError, TruncationOverflowError, ZeroDenominatorError
from fock_core import coherent_tail

logger = logging.getLogger(__name__)

GridRange = Tuple[float, float, int]


def _as_range(value, name: str) -> GridRange:
    try:
        low, high, steps = value
    except (TypeError, ValueError):
        raise InvalidConfigError(f"{name} must be (min, max, steps), got {value!r}")
    if isinstance(steps, bool) or int(steps) != steps:
        raise InvalidConfigError(f"{name} steps must be an integer, got {steps!r}")
    return float(low), float(high), int(steps)


@dataclass
class SweepConfig:
    """Grid and output selection for one sweep"""
    ax_sq: float = 1.0
    ph_mag: float = 1.0
    kt_range: GridRange = (0.0, 1.0, 50)
    delta_range: GridRange = (-math.pi, math.pi, 72)
    outputs: Tuple[str, ...] = DEFAULT_SWEEP_OUTPUTS
    oracle: bool = False
    n_max: int = DEFAULT_N_MAX
    k: float = 1.0
    preset: Optional[str] = None

    def __post_init__(self):
        self.kt_range = _as_range(self.kt_range, 'kt_range')
        self.delta_range = _as_range(self.delta_range, 'delta_range')
        self.outputs = tuple(self.outputs)

    def validate(self) -> 'SweepConfig':
        """Raise InvalidConfigError on any violated invariant"""
        for name in ('ax_sq', 'ph_mag', 'k'):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise InvalidConfigError(f"{name} must be a finite number, got {value!r}")
        if self.ax_sq < 0.0 or self.ph_mag < 0.0:
            raise InvalidConfigError("ax_sq and ph_mag must be nonnegative")
        if self.k <= 0.0:
            raise InvalidConfigError(f"k must be positive, got {self.k}")

        for name, (low, high, steps) in (('kt_range', self.kt_range), ('delta_range', self.delta_range)):
            if steps < 2:
                raise InvalidConfigError(f"{name} needs at least 2 steps, got {steps}")
            if not (math.isfinite(low) and math.isfinite(high)) or high <= low:
                raise InvalidConfigError(f"{name} needs min < max, got ({low}, {high})")
        kt_low, kt_high, _ = self.kt_range
        if kt_low < 0.0:
            raise InvalidConfigError(f"kt must be nonnegative, got min {kt_low}")

        unknown = [name for name in self.outputs if name not in SWEEP_OUTPUTS]
        if unknown or not self.outputs:
            raise InvalidConfigError(f"outputs must be a nonempty subset of {SWEEP_OUTPUTS}, got {self.outputs}")

        try:
            bogoliubov(kt_high)
        except HopsError as exc:
            raise InvalidConfigError(f"kt max outside the supported range: {exc}") from exc

        if self.oracle:
            self._validate_oracle()
        return self

    def _validate_oracle(self):
        if isinstance(self.n_max, bool) or not isinstance(self.n_max, int) or not 1 <= self.n_max <= DENSE_N_MAX_LIMIT:
            raise InvalidConfigError(f"oracle columns need an integer n_max in [1, {DENSE_N_MAX_LIMIT}], got {self.n_max!r}")
        if ORACLE_COUPLING * self.kt_range[1] > MAX_COUPLING_TIME:
            raise InvalidConfigError(
                f"oracle evolution supports kt <= {MAX_COUPLING_TIME / ORACLE_COUPLING}, got {self.kt_range[1]}"
            )
        probe = HopsInput(self.ax_sq, self.ph_mag, 0.0)
        for role, alpha in zip(('alpha_x', 'alpha_y'), probe.amplitudes()):
            tail = coherent_tail(alpha, self.n_max)
            if tail >= COHERENT_TAIL_LIMIT:
                raise InvalidConfigError(f"n_max={self.n_max} too small for {role}: Poisson tail {tail:.3e}")

    def kt_values(self) -> np.ndarray:
        """Inclusive grid min..max"""
        low, high, steps = self.kt_range
        return np.linspace(low, high, steps)

    def delta_values(self) -> np.ndarray:
        """Half-open grid (min, max]: min + (max - min) j / steps for j = 1..steps"""
        low, high, steps = self.delta_range
        return low + (high - low) * np.arange(1, steps + 1) / steps

    def columns(self) -> List[str]:
        """CSV column order for the selected outputs"""
        columns = ['kt', 'delta_h']
        if 'sq' in self.outputs:
            columns += SWEEP_COLUMN_GROUPS['sq']
        if 'moments' in self.outputs:
            columns += SWEEP_COLUMN_GROUPS['moments']
        if 'variances' in self.outputs:
            columns += SWEEP_COLUMN_GROUPS['variances']
        if 'degree' in self.outputs:
            columns += SWEEP_COLUMN_GROUPS['degree']
        if 'sq' in self.outputs:
            columns += SWEEP_COLUMN_GROUPS['squeezed']
        if 'degree' in self.outputs:
            columns += SWEEP_COLUMN_GROUPS['t0']
        if 'margins' in self.outputs:
            columns += SWEEP_COLUMN_GROUPS['margins']
        if self.oracle:
            columns += ORACLE_COLUMNS
        return columns

    def to_dict(self) -> Dict[str, Any]:
        return {
            'ax_sq': self.ax_sq,
            'ph_mag': self.ph_mag,
            'kt_range': list(self.kt_range),
            'delta_range': list(self.delta_range),
            'outputs': list(self.outputs),
            'oracle': self.oracle,
            'n_max': self.n_max,
            'k': self.k,
            'preset': self.preset,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'SweepConfig':
        known = set(cls().to_dict())
        unknown = set(data) - known
        if unknown:
            raise InvalidConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)


@dataclass
class SweepRow:
    """One grid point of a sweep"""
    kt: float
    delta_h: float
    values: Dict[str, Any] = field(default_factory=dict)
    flagged: bool = False

    def to_record(self, columns: List[str]) -> Dict[str, str]:
        record = {}
        for column in columns:
            value = self.kt if column == 'kt' else self.delta_h if column == 'delta_h' else self.values.get(column)
            record[column] = _format_cell(value)
        return record


def _format_cell(value) -> str:
    if value is None:
        return ''
    if isinstance(value, bool):
        return '1' if value else '0'
    if isinstance(value, (float, np.floating)):
        return format(float(value), FLOAT_FORMAT)
    return str(value)


def evaluate_point(config: SweepConfig, kt: float, delta_h: float) -> SweepRow:
    """Closed forms at one grid point, plus oracle columns when enabled"""
    inp = HopsInput(config.ax_sq, config.ph_mag, delta_h)
    row = SweepRow(kt=float(kt), delta_h=float(delta_h))
    values = row.values

    moments = hidden_moments(inp, kt)
    closed = hidden_variances(inp, kt, VarianceSource.CLOSED_FORM)
    sq = squeezing_function(inp, kt)
    values['sq'] = sq
    values['squeezed'] = sq > 1.0
    values.update(zip(SWEEP_COLUMN_GROUPS['moments'], moments.as_tuple()))
    values.update(zip(SWEEP_COLUMN_GROUPS['variances'], closed.as_tuple()))
    try:
        values['degree'] = degree_hidden(inp, kt)
    except ZeroDenominatorError:
        values['degree'] = None
    if config.ax_sq > 0.0 and config.ph_mag > 0.0:
        values['t0'] = critical_time(inp, config.k)

    margin_moments, margin_variances = moments, hidden_variances(inp, kt, VarianceSource.DERIVED)
    if config.oracle:
        try:
            state = oracle_state(inp, kt, config.n_max)
            margin_moments = oracle_moments(inp, kt, state=state)
            margin_variances = hidden_variances(inp, kt, VarianceSource.ORACLE, state=state)
            values.update(zip(ORACLE_COLUMNS[:4], margin_moments.as_tuple()))
            values.update(zip(ORACLE_COLUMNS[4:8], margin_variances.as_tuple()))
            values['oracle_status'] = 'ok'
        except TruncationOverflowError as exc:
            row.flagged = True
            values['oracle_status'] = 'overflow'
            margin_moments, margin_variances = moments, hidden_variances(inp, kt, VarianceSource.DERIVED)
            logger.warning("oracle overflow at kt=%.6g delta_h=%.6g (shell mass %.3e)", kt, delta_h, exc.shell_mass)

    if 'margins' in config.outputs:
        margins = inequality_margins(margin_moments, margin_variances)
        values.update({f"margin_{name}": value for name, value in margins.items()})
    return row


def run_sweep(config: SweepConfig, workers: int = DEFAULT_WORKERS) -> List[SweepRow]:
    """Evaluate every grid point; rows are sorted by (kt, delta_h)"""
    config.validate()
    points = [(float(kt), float(delta)) for kt in config.kt_values() for delta in config.delta_values()]
    logger.info("sweep: %d points, %d workers, oracle=%s", len(points), workers, config.oracle)

    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        futures = [executor.submit(evaluate_point, config, kt, delta) for kt, delta in points]
        rows = [future.result() for future in futures]

    rows.sort(key=lambda row: (row.kt, row.delta_h))
    return rows


def write_sweep_csv(rows: List[SweepRow], config: SweepConfig, path: Union[str, Path]) -> Path:
    """Single writer for the data file and its .meta.json sidecar"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    columns = config.columns()
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.DictWriter(f, fieldnames=columns, lineterminator='\n')
        writer.writeheader()
        for row in rows:
            writer.writerow(row.to_record(columns))

    meta = {
        'config': config.to_dict(),
        'columns': columns,
        'rows': len(rows),
        'flagged_rows': [[row.kt, row.delta_h] for row in rows if row.flagged],
    }
    meta_path = path.with_name(path.name + '.meta.json')
    with open(meta_path, 'w', encoding='utf-8') as f:
        json.dump(meta, f, indent=2, ensure_ascii=False)
    return path


def cmd_sweep(config: SweepConfig, out: Union[str, Path], workers: int = DEFAULT_WORKERS) -> Tuple[Path, List[SweepRow]]:
    rows = run_sweep(config, workers)
    path = write_sweep_csv(rows, config, out)
    return path, rows
