"""
The constants nu_m: nu_m^{2m} is the first eigenvalue of (-d^2/dx^2)^m on (-1/2, 1/2)
with clamped ends, u = u' = ... = u^{(m-1)} = 0 at x = +-1/2.

Solutions are combinations of exp(nu*w*x) over the 2m roots w of w^{2m} = (-1)^m.
The problem is symmetric under x -> -x, so it splits into an even class (cosh) and an
odd class (sinh), each an m x m determinant with conditions at x = 1/2 only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache, partial
from typing import List, Tuple

import numpy as np

from .errors import RootScanError, UnsupportedError
from .log import get_logger
from .specfun import find_root_bracketed

log = get_logger(__name__)

M_MAX = 6
SCAN_STEP = 0.05
SCAN_MAX = 20.0
ROOT_TOL = 1e-10
PARITIES = ("even", "odd")


@dataclass(frozen=True)
class NuConstant:
    m: int
    value: float

    def __float__(self) -> float:
        return self.value


def _check_m(m: int) -> None:
    if int(m) != m or not 1 <= m <= M_MAX:
        raise UnsupportedError(f"nu_m is implemented for 1 <= m <= {M_MAX}, got m={m!r}")


def half_roots(m: int) -> List[complex]:
    """One representative of each +-pair of roots of w^{2m} = (-1)^m."""
    out = []
    for k in range(2 * m):
        w = complex(math.cos(math.pi * (m + 2 * k) / (2 * m)),
                    math.sin(math.pi * (m + 2 * k) / (2 * m)))
        re = 0.0 if abs(w.real) < 1e-12 else w.real
        im = 0.0 if abs(w.imag) < 1e-12 else w.imag
        w = complex(re, im)
        if re > 0 or (re == 0 and im > 0):
            out.append(w)
    return out


def _boundary_matrix(m: int, nu: float, parity: str) -> np.ndarray:
    cols: List[np.ndarray] = []
    for w in half_roots(m):
        z = nu * w / 2.0
        ch, sh = np.cosh(z), np.sinh(z)
        col = np.empty(m, dtype=complex)
        for j in range(m):
            even_row = (j % 2 == 0)
            if parity == "even":
                col[j] = w ** j * (ch if even_row else sh)
            else:
                col[j] = w ** j * (sh if even_row else ch)
        col = col / math.exp(nu * abs(w.real) / 2.0)
        if w.imag == 0:
            cols.append(col.real)
        elif w.real == 0:
            # w = i: the column is purely real (even class) or purely imaginary (odd class)
            cols.append(col.real if parity == "even" else col.imag)
        elif w.imag > 0:
            cols.append(col.real)
            cols.append(col.imag)
        # w with Im < 0 is the conjugate of one already taken
    return np.column_stack(cols)


def characteristic_determinant(m: int, nu: float, parity: str = "even") -> float:
    _check_m(m)
    if parity not in PARITIES:
        raise UnsupportedError(f"parity must be one of {PARITIES}, got {parity!r}")
    return float(np.linalg.det(_boundary_matrix(m, nu, parity)))


def _noise_floor(m: int, nu: float, parity: str) -> float:
    a = _boundary_matrix(m, nu, parity)
    return 1e-10 * float(np.prod(np.linalg.norm(a, axis=0)))


def first_root(m: int, parity: str, step: float = SCAN_STEP, stop: float = SCAN_MAX) -> float:
    """Smallest accepted positive root of the class determinant on (0, stop]."""
    _check_m(m)
    f = partial(characteristic_determinant, m, parity=parity)
    a = step
    fa = f(a)
    while a < stop:
        b = a + step
        fb = f(b)
        scale = max(abs(fa), abs(fb))
        if fa * fb < 0 and scale > max(_noise_floor(m, a, parity), _noise_floor(m, b, parity)):
            r = find_root_bracketed(f, a, b, tol=ROOT_TOL)
            if abs(f(r)) <= 1e-6 * scale:
                return r
            log.debug("rejected sign change near %.4f for m=%d (%s)", r, m, parity)
        a, fa = b, fb
    raise RootScanError(f"No determinant root for m={m} ({parity}) on (0, {stop}]")


def nu(m: int) -> NuConstant:
    _check_m(m)
    roots: List[Tuple[float, str]] = []
    for parity in PARITIES:
        try:
            roots.append((first_root(m, parity), parity))
        except RootScanError:
            log.debug("no %s-class root for m=%d below %g", parity, m, SCAN_MAX)
    if not roots:
        raise RootScanError(f"No determinant root for m={m} on (0, {SCAN_MAX}]")
    value, parity = min(roots)
    log.debug("nu_%d = %.10f from the %s class", m, value, parity)
    return NuConstant(m=m, value=value)


@lru_cache(maxsize=None)
def nu_cached(m: int) -> float:
    return nu(m).value


def nu_table(ms: Tuple[int, ...] = tuple(range(1, M_MAX + 1))) -> List[NuConstant]:
    return [NuConstant(m, nu_cached(m)) for m in ms]
