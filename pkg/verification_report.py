"""
Verification Report for the HOPS simulator
Collects closed-form vs oracle deviations per suite and saves them as text, CSV and JSON
"""
import csv
import json
import os
from collections import OrderedDict
from dataclasses import dataclass, asdict
from datetime import datetime
from typing import Any, Dict, List, Optional

from config import FLOAT_FORMAT, REPORT_CSV_FILE, REPORT_SUMMARY_FILE, REPORT_TEXT_FILE

CSV_FIELDS = ['suite', 'case', 'quantity', 'expected', 'measured', 'deviation',
              'tolerance', 'passed', 'informational', 'note']


@dataclass
class DeviationRow:
    """One compared quantity"""
    suite: str
    case: str
    quantity: str
    expected: Optional[float]
    measured: Optional[float]
    deviation: Optional[float]
    tolerance: Optional[float]
    passed: bool
    informational: bool = False
    note: str = ""

    @property
    def counts_as_failure(self) -> bool:
        return not self.passed and not self.informational

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'DeviationRow':
        return cls(**data)


@dataclass
class SuiteSummary:
    """Per-suite totals"""
    suite: str
    cases: int
    failures: int
    informational: int
    max_deviation: float

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['passed'] = self.passed
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'SuiteSummary':
        data = dict(data)
        data.pop('passed', None)
        return cls(**data)


def _cell(value) -> str:
    if value is None:
        return ''
    if isinstance(value, bool):
        return '1' if value else '0'
    if isinstance(value, float):
        return format(value, FLOAT_FORMAT)
    return str(value)


class VerificationReport:
    """Rows of every verification suite"""

    def __init__(self, n_max: int, fixture_path: str = ""):
        self.n_max = n_max
        self.fixture_path = fixture_path
        self.rows: List[DeviationRow] = []

    def add(self, suite: str, case: str, quantity: str, expected: Optional[float], measured: Optional[float],
            tolerance: Optional[float], relative: bool = False, informational: bool = False,
            note: str = "") -> DeviationRow:
        """Record a comparison; relative scales the tolerance by max(1, |expected|)"""
        deviation = None
        passed = False
        if expected is not None and measured is not None:
            deviation = abs(measured - expected)
            allowed = tolerance * max(1.0, abs(expected)) if relative else tolerance
            passed = deviation <= allowed
        row = DeviationRow(suite, case, quantity, expected, measured, deviation, tolerance,
                           passed, informational, note)
        self.rows.append(row)
        return row

    def add_check(self, suite: str, case: str, quantity: str, passed: bool, deviation: Optional[float] = None,
                  tolerance: Optional[float] = None, informational: bool = False, note: str = "") -> DeviationRow:
        """Record a pass/fail predicate"""
        row = DeviationRow(suite, case, quantity, None, None, deviation, tolerance,
                           bool(passed), informational, note)
        self.rows.append(row)
        return row

    def add_failure(self, suite: str, case: str, message: str) -> DeviationRow:
        """Record a case that raised before it could be compared"""
        return self.add_check(suite, case, 'error', False, note=message)

    def get_suite_summaries(self) -> List[SuiteSummary]:
        suites: Dict[str, List[DeviationRow]] = OrderedDict()
        for row in self.rows:
            suites.setdefault(row.suite, []).append(row)

        summaries = []
        for suite, rows in suites.items():
            deviations = [row.deviation for row in rows if row.deviation is not None and not row.informational]
            summaries.append(SuiteSummary(
                suite=suite,
                cases=len(rows),
                failures=sum(1 for row in rows if row.counts_as_failure),
                informational=sum(1 for row in rows if row.informational),
                max_deviation=max(deviations, default=0.0),
            ))
        return summaries

    @property
    def passed(self) -> bool:
        return not any(row.counts_as_failure for row in self.rows)

    def get_failures(self) -> List[DeviationRow]:
        return [row for row in self.rows if row.counts_as_failure]

    def get_informational(self, suite: Optional[str] = None) -> List[DeviationRow]:
        return [row for row in self.rows if row.informational and (suite is None or row.suite == suite)]

    def render_text(self) -> str:
        lines = [f"HOPS verification report (n_max={self.n_max}, fixture={self.fixture_path})", ""]
        lines.append(f"{'suite':<28} {'cases':>6} {'fail':>5} {'info':>5} {'max deviation':>14}")
        for summary in self.get_suite_summaries():
            mark = "ok" if summary.passed else "FAIL"
            lines.append(f"{summary.suite:<28} {summary.cases:>6} {summary.failures:>5} "
                         f"{summary.informational:>5} {summary.max_deviation:>14.3e}  {mark}")

        informational = self.get_informational()
        if informational:
            lines += ["", "Informational comparisons (printed formulas vs measurement):"]
            lines.append(f"{'suite':<24} {'case':<36} {'quantity':<22} {'printed':>14} {'measured':>14} {'difference':>12}")
            for row in informational:
                printed = '' if row.expected is None else f"{row.expected:.8g}"
                measured = '' if row.measured is None else f"{row.measured:.8g}"
                diff = '' if row.expected is None or row.measured is None else f"{row.expected - row.measured:+.6g}"
                lines.append(f"{row.suite:<24} {row.case:<36} {row.quantity:<22} {printed:>14} {measured:>14} {diff:>12}")

        failures = self.get_failures()
        if failures:
            lines += ["", "Failures:"]
            for row in failures:
                lines.append(f"  [{row.suite}] {row.case} {row.quantity}: deviation={row.deviation} {row.note}")

        lines += ["", "PASSED" if self.passed else "FAILED"]
        return "\n".join(lines) + "\n"

    def to_summary(self) -> Dict[str, Any]:
        return {
            'n_max': self.n_max,
            'fixture': self.fixture_path,
            'passed': self.passed,
            'suites': [summary.to_dict() for summary in self.get_suite_summaries()],
            'failures': [row.to_dict() for row in self.get_failures()],
        }

    def save_data(self, out_dir: str) -> Dict[str, str]:
        """Save the text report, the CSV rows and the JSON summary"""
        os.makedirs(out_dir, exist_ok=True)
        paths = {
            'text': os.path.join(out_dir, REPORT_TEXT_FILE),
            'csv': os.path.join(out_dir, REPORT_CSV_FILE),
            'summary': os.path.join(out_dir, REPORT_SUMMARY_FILE),
        }

        with open(paths['text'], 'w', encoding='utf-8') as f:
            f.write(self.render_text())

        with open(paths['csv'], 'w', newline='', encoding='utf-8') as f:
            writer = csv.DictWriter(f, fieldnames=CSV_FIELDS, lineterminator='\n')
            writer.writeheader()
            for row in self.rows:
                writer.writerow({key: _cell(value) for key, value in row.to_dict().items()})

        summary = self.to_summary()
        summary['generated'] = datetime.now().isoformat()
        with open(paths['summary'], 'w', encoding='utf-8') as f:
            json.dump(summary, f, indent=2, ensure_ascii=False)

        return paths

    @classmethod
    def load_rows(cls, csv_path: str, n_max: int = 0) -> 'VerificationReport':
        """Rebuild a report from its CSV rows"""
        report = cls(n_max)
        with open(csv_path, 'r', encoding='utf-8') as f:
            for record in csv.DictReader(f):
                data = {}
                for key in CSV_FIELDS:
                    raw = record[key]
                    if key in ('passed', 'informational'):
                        data[key] = raw == '1'
                    elif key in ('expected', 'measured', 'deviation', 'tolerance'):
                        data[key] = float(raw) if raw != '' else None
                    else:
                        data[key] = raw
                report.rows.append(DeviationRow.from_dict(data))
        return report
