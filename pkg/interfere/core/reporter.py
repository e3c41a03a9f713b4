import csv
import json
import math
import re
from io import StringIO
from typing import Any, Dict, List, Optional

from .storage import StorageManager

ERROR_COLUMN = 'error'


def _slug(label: str) -> str:
    return re.sub(r'[^A-Za-z0-9]+', '-', str(label)).strip('-') or 'graph'


def _format(value: Any) -> Any:
    if isinstance(value, float) and math.isnan(value):
        return 'nan'
    return value


class StudyReporter:
    """Collects study rows in grid order and renders them as CSV, JSON and console text"""

    def __init__(self, study: str, label: str, seed: int, columns: List[str]):
        self.study = study
        self.label = label
        self.seed = seed
        self.columns = list(columns)
        self.rows: List[Dict[str, Any]] = []
        self.extra_tables: Dict[str, List[Dict[str, Any]]] = {}
        self.metadata: Dict[str, Any] = {}

    def add_row(self, row: Dict[str, Any]) -> None:
        self.rows.append(dict(row))

    def add_error(self, keys: Dict[str, Any], message: str) -> None:
        """Failed cell: key columns kept, numeric columns empty"""
        row = {column: '' for column in self.columns}
        row.update(keys)
        row[ERROR_COLUMN] = message
        self.rows.append(row)

    def add_table(self, name: str, rows: List[Dict[str, Any]]) -> None:
        self.extra_tables.setdefault(name, []).extend(rows)

    @property
    def failed(self) -> int:
        return sum(1 for row in self.rows if row.get(ERROR_COLUMN))

    def output_columns(self) -> List[str]:
        if self.failed:
            return self.columns + [ERROR_COLUMN]
        return list(self.columns)

    def filename(self, ext: str, suffix: Optional[str] = None) -> str:
        parts = ['interfere', self.study, _slug(self.label)]
        if suffix:
            parts.append(suffix)
        parts.append(f"seed{self.seed}")
        return f"{'_'.join(parts)}.{ext}"

    @staticmethod
    def _to_csv(columns: List[str], rows: List[Dict[str, Any]]) -> str:
        output = StringIO()
        writer = csv.DictWriter(output, fieldnames=columns, extrasaction='ignore', lineterminator='\n')
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _format(row.get(k, '')) for k in columns})
        return output.getvalue()

    def to_csv(self) -> str:
        return self._to_csv(self.output_columns(), self.rows)

    def table_to_csv(self, name: str) -> str:
        rows = self.extra_tables.get(name, [])
        columns = list(rows[0].keys()) if rows else []
        return self._to_csv(columns, rows)

    def to_json(self) -> str:
        report_data = {
            'study': self.study,
            'label': self.label,
            'seed': self.seed,
            'rows': len(self.rows),
            'failed_cells': self.failed,
            **self.metadata,
        }
        return json.dumps(report_data, indent=2, sort_keys=True, default=str) + '\n'

    def generate_summary_report(self) -> str:
        columns = self.output_columns()
        cells = [[str(_format(row.get(c, ''))) for c in columns] for row in self.rows]
        widths = [max([len(c)] + [len(r[k]) for r in cells]) for k, c in enumerate(columns)]

        report = []
        report.append("=" * 80)
        report.append(f"INTERFERE - {self.study.upper()} STUDY ({self.label}, seed {self.seed})")
        report.append("=" * 80)
        report.append("  ".join(c.rjust(w) for c, w in zip(columns, widths)))
        report.append("-" * min(80, sum(widths) + 2 * (len(widths) - 1)))
        for r in cells:
            report.append("  ".join(v.rjust(w) for v, w in zip(r, widths)))
        if self.failed:
            report.append("")
            report.append(f"Failed cells: {self.failed}")
        report.append("=" * 80)
        return "\n".join(report)

    def save(self, storage: StorageManager) -> List[str]:
        """Write the CSV, any extra tables and the JSON sidecar; returns the paths"""
        saved = [storage.save_file(self.to_csv(), self.filename('csv'))]
        for name in sorted(self.extra_tables):
            saved.append(storage.save_file(self.table_to_csv(name), self.filename('csv', suffix=name)))
        saved.append(storage.save_file(self.to_json(), self.filename('json')))
        return saved
