import logging
import sys
from typing import Optional

from rich.console import Console
from rich.logging import RichHandler

ROOT = "weylbound"

def get_logger(name: str) -> logging.Logger:
    if name == ROOT or name.startswith(ROOT + "."):
        return logging.getLogger(name)
    return logging.getLogger(f"{ROOT}.{name}")

def setup_logging(verbose: int = 0, console: Optional[Console] = None) -> logging.Logger:
    """
    Install a single RichHandler on the package logger. Library modules never call this;
    the CLI does, once per process.
    """
    logger = logging.getLogger(ROOT)
    for h in list(logger.handlers):
        logger.removeHandler(h)
    con = console or Console(file=sys.stderr, color_system="standard")
    handler = RichHandler(console=con, show_time=False, show_path=verbose > 1, markup=False)
    handler.setFormatter(logging.Formatter("%(message)s"))
    logger.addHandler(handler)
    logger.setLevel(logging.DEBUG if verbose > 0 else logging.WARNING)
    return logger
