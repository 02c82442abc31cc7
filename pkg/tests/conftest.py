import os
import sys
from pathlib import Path

import pytest
from rich.console import Console

_force_tty = os.environ.get("FORCE_TTY", "").lower() in ("1", "true", "yes", "on")
_isatty = getattr(sys.stderr, "isatty", lambda: False)()
_console = Console(file=sys.stderr, force_terminal=(_isatty or _force_tty), color_system="standard")
_tty_progress = os.environ.get("TTY_PROGRESS", "").lower() in ("1", "true", "yes", "on")

DATA_DIR = Path(__file__).parent / "data"


def _print_progress(evt):
    phase = evt.get("phase", "")
    pct = int(evt.get("pct", 0))
    done, total = evt.get("done"), evt.get("total")
    state = getattr(_print_progress, "_state", {"last": {}})
    last = state["last"]
    prev = last.get(phase, -1)
    counter = f"({done}/{total})" if done is not None and total else ""

    if not (_tty_progress and getattr(_console, "is_terminal", False)):
        # pytest logs and CI: only the completion line per phase
        if pct == 100 and prev != 100:
            _console.print(" ".join(p for p in ("[progress]", phase, f"{pct}%", counter) if p))
        last[phase] = pct
        _print_progress._state = state
        return

    if pct < 100 and prev != -1 and (pct - prev) < 5:
        return
    _console.print("\r\x1b[2K" + " ".join(p for p in ("[progress]", phase, f"{pct}%", counter) if p),
                   end="")
    if pct >= 100:
        _console.print()
    last[phase] = pct
    _print_progress._state = state


@pytest.fixture
def progress_printer():
    """Callback that prints progress events and records them for assertions."""
    events = []

    def cb(evt):
        events.append(dict(evt))
        _print_progress(evt)

    cb.events = events
    return cb


@pytest.fixture
def bolza_file():
    return DATA_DIR / "bolza_eigenvalues.dat"
