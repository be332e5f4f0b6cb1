"""
CSV writer for helmgrid result tables.

Rows are dicts keyed by column name. The output is deterministic: fixed column
order, ',' separator, '.' decimal point and floats written with %.12g.
Columns listed as complex are split into <name>_re and <name>_im.
"""

import csv
import io
import math
import os
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np

from ..logs.core.logger_config import get_component_logger

FLOAT_FORMAT = "%.12g"


def format_value(value) -> str:
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return FLOAT_FORMAT % value
    return str(value)


class CsvOutput:
    """Renders rows under a fixed header; complex columns become re/im pairs."""

    def __init__(self, columns: Sequence[str], complex_columns: Iterable[str] = ()):
        self.columns = list(columns)
        self.complex_columns = set(complex_columns)
        unknown = self.complex_columns - set(self.columns)
        if unknown:
            raise ValueError(f"complex columns {sorted(unknown)} are not in the header")
        self.logger = get_component_logger('helmgrid.output')

    @property
    def header(self) -> List[str]:
        names = []
        for column in self.columns:
            if column in self.complex_columns:
                names.extend([f"{column}_re", f"{column}_im"])
            else:
                names.append(column)
        return names

    def _cells(self, row: Dict) -> List[str]:
        cells = []
        for column in self.columns:
            if column not in row:
                raise KeyError(f"row is missing column '{column}'")
            value = row[column]
            if column in self.complex_columns:
                value = complex(value)
                cells.extend([format_value(value.real), format_value(value.imag)])
            else:
                cells.append(format_value(value))
        return cells

    def render(self, rows: Iterable[Dict]) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, delimiter=',', lineterminator='\n')
        writer.writerow(self.header)
        for row in rows:
            writer.writerow(self._cells(row))
        return buffer.getvalue()

    def write(self, rows: Iterable[Dict], path: Optional[str] = None) -> str:
        """Write to ``path``, or return the text when no path is given."""
        rows = list(rows)
        text = self.render(rows)
        if path is None:
            return text
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(path, 'w', newline='') as file:
            file.write(text)
        self.logger.info(f"Wrote {len(rows)} rows to {path}")
        return text
