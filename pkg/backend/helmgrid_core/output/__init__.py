"""
Output handlers for helmgrid:
- CsvOutput: result tables, the only artifact format
- ConsoleOutput: one-line run summaries on stdout
"""

from .console_output import ConsoleOutput
from .csv_output import CsvOutput, format_value

__all__ = ['ConsoleOutput', 'CsvOutput', 'format_value']
