from typing import Callable, Dict, Iterable, Iterator, Optional, Sequence, TypeVar

T = TypeVar("T")


class Progress:
    """
    Progress dispatcher for grid evaluations. All events go through emit(event: dict).
    event = {"phase": str, "pct": int, "done": int, "total": int, ...}

    step() drops events whose integer percentage has not moved, so a 10^5-point grid
    produces at most ~100 callbacks per phase.
    """
    def __init__(self, cb: Optional[Callable[[Dict], None]] = None) -> None:
        self._cb = cb
        self._last: Dict[str, int] = {}

    def emit(self, phase: str, pct: int, /, **kw) -> None:
        if self._cb:
            evt = {"phase": phase, "pct": pct}
            evt.update(kw)
            self._cb(evt)

    def step(self, phase: str, done: int, total: int, /, **kw) -> None:
        pct = 100 if total <= 0 else int(100 * done / total)
        if pct == self._last.get(phase) and done < total:
            return
        self._last[phase] = pct
        self.emit(phase, pct, done=done, total=total, **kw)

    def track(self, phase: str, items: Iterable[T], total: Optional[int] = None) -> Iterator[T]:
        """Yield items, reporting a step after each one has been processed."""
        if total is None:
            items = items if isinstance(items, Sequence) else list(items)
            total = len(items)
        for done, item in enumerate(items, start=1):
            yield item
            self.step(phase, done, total)
