from __future__ import annotations

import logging

from rich.console import Console
from rich.logging import RichHandler

# Logs and summary tables share stderr; CSV paths and --dump-config go to stdout.
CONSOLE = Console(stderr=True)


def setup_logging(level: int = logging.INFO, verbose: bool = False) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else level,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=CONSOLE, rich_tracebacks=True, show_path=verbose)],
        force=True,
    )
