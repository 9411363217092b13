from .csvout import csv_body, csv_header, read_csv, write_csv, write_run_metadata
from .logging import CONSOLE, setup_logging

__all__ = [
    "CONSOLE",
    "csv_body",
    "csv_header",
    "read_csv",
    "setup_logging",
    "write_csv",
    "write_run_metadata",
]
