from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, List, Optional, Tuple, Union

import numpy as np

from .errors import SpectrumFileError, ValidationError
from .log import get_logger

log = get_logger(__name__)


@dataclass(frozen=True)
class Spectrum:
    """
    Sorted Laplace eigenvalues lambda_i^2 with multiplicity, complete up to max_known.
    """
    eigenvalues: Tuple[float, ...]
    max_known: float = field(default=math.inf)

    def __post_init__(self) -> None:
        ev = self.eigenvalues
        if any(v < 0 or not math.isfinite(v) for v in ev):
            raise ValidationError("Spectrum values must be finite and >= 0")
        if any(a > b for a, b in zip(ev, ev[1:])):
            raise ValidationError("Spectrum values must be sorted ascending")
        if math.isinf(self.max_known) and ev:
            object.__setattr__(self, "max_known", ev[-1])

    @classmethod
    def from_values(cls, values: Iterable[float], max_known: Optional[float] = None) -> "Spectrum":
        ev = tuple(sorted(float(v) for v in values))
        return cls(ev, math.inf if max_known is None else float(max_known))

    def __len__(self) -> int:
        return len(self.eigenvalues)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.eigenvalues, dtype=float)

    def count_upto(self, c: float) -> int:
        """#{lambda^2 <= c}, zero included."""
        return bisect.bisect_right(self.eigenvalues, c)

    def nonzero_upto(self, c: float) -> np.ndarray:
        a = self.array
        return a[(a > 0) & (a <= c)]

    def check_complete(self, c: float) -> None:
        if c > self.max_known:
            raise ValidationError(
                f"Spectrum is complete only up to {self.max_known:g}, but c={c:g} was requested"
            )


@dataclass(frozen=True)
class EigenvalueFile:
    path: Path
    parsed: Spectrum
    skipped_lines: int = 0
    inserted_zero: bool = False


def parse_eigenvalue_file(
    path: Union[str, Path],
    closed: bool = False,
    sqrt_input: bool = False,
    max_known: Optional[float] = None,
) -> EigenvalueFile:
    """
    One eigenvalue lambda^2 per line (lambda with sqrt_input). '#' lines and blank lines
    are ignored; lines that do not start with a number are counted and reported.
    """
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise SpectrumFileError(f"Cannot read eigenvalue file '{p}': {e}") from None
    values: List[float] = []
    skipped = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        token = line.replace(",", " ").split()[0]
        try:
            v = float(token)
        except ValueError:
            skipped += 1
            log.debug("%s:%d: not a number: %r", p, lineno, raw)
            continue
        if not math.isfinite(v) or (v < 0 and not sqrt_input):
            skipped += 1
            log.debug("%s:%d: rejected value %r", p, lineno, token)
            continue
        values.append(v * v if sqrt_input else v)
    if not values:
        raise SpectrumFileError(f"Eigenvalue file '{p}' has no numeric values")
    if skipped:
        log.warning("%s: skipped %d line(s) without a usable eigenvalue", p, skipped)
    values.sort()
    inserted = False
    if closed and values[0] != 0.0:
        values.insert(0, 0.0)
        inserted = True
        log.warning("%s: inserted the eigenvalue 0 of a closed manifold", p)
    spec = Spectrum(tuple(values), math.inf if max_known is None else float(max_known))
    return EigenvalueFile(path=p, parsed=spec, skipped_lines=skipped, inserted_zero=inserted)
