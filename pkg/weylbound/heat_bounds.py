"""
Heat-trace bounds: local and global upper bounds, the truncation remainder R_t^c,
and the two sides of the Selberg trace formula for closed hyperbolic surfaces.
"""
from __future__ import annotations

import math
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import special

from .errors import DomainError, ValidationError, WindowError
from .geometry import BoundPair, Dimension, HeatQuery, HyperbolicSurface, LocalGeometry
from .log import get_logger
from .nu_constants import nu_cached
from .progress import Progress
from .specfun import DEFAULT_SPEC, QuadratureSpec, gamma_upper, quad_semi_infinite, sech2
from .spectrum import Spectrum
from .weyl_counting import weyl_constant

log = get_logger(__name__)


def _nu(dim: Dimension) -> float:
    return nu_cached((dim.n + 2) // 2)


def local_heat_trace_upper(dim: Dimension, geom: LocalGeometry, t: float) -> float:
    if not t > 0:
        raise DomainError(f"heat time must be > 0, got t={t}")
    n, d = dim.n, geom.d
    v = _nu(dim)
    lead = math.gamma((n + 2) / 2.0) * t ** (-n / 2.0)
    rem = (n * math.gamma((n + 1) / 2.0) * (2 * v * v + math.pi * v) / (d * math.pi)
           * (1.0 / math.sqrt(t) + v / d) ** (n - 1))
    return weyl_constant(dim) * (lead + rem)


def heat_trace_upper(dim: Dimension, volume: float, systole: float, t: float) -> float:
    if not volume > 0:
        raise ValidationError(f"Field 'volume' expected > 0, got {volume!r}")
    return volume * local_heat_trace_upper(dim, LocalGeometry(systole), t)


def remainder_upper_surface(geom: LocalGeometry, q: HeatQuery) -> float:
    """Upper bound on R_t^c(x) for surfaces."""
    d, t, c = geom.d, q.t, q.c
    pi = math.pi
    v = nu_cached(2)
    c1 = (4 * v * v + 2 * v * pi) / (pi * d)
    bracket = (-c + math.sqrt(c) * 4 * v * v / (pi * d)
               + (8 * v ** 3 + 2 * v * v * pi) / (pi * d * d) + 1.0 / 12.0)
    return (gamma_upper(2.0, t * c) / t
            + c1 * gamma_upper(1.5, t * c) / math.sqrt(t)
            + math.exp(-c * t) * bracket) / (4 * pi)


def remainder_upper_general(
    dim: Dimension, geom: LocalGeometry, q: HeatQuery, n_lower_at_c: float
) -> float:
    """
    Upper bound on R_t^c(x) in dimension n. n_lower_at_c must be a lower bound for
    N_x(sqrt c); an upper bound there would flip the inequality.
    """
    n, d, t, c = dim.n, geom.d, q.t, q.c
    v = _nu(dim)
    c1 = weyl_constant(dim)
    c2 = n * (2 * v * v + math.pi * v) / (d * math.pi)
    c3 = v / d
    total = -n_lower_at_c * math.exp(-c * t)
    total += c1 * t ** (-n / 2.0) * gamma_upper(n / 2.0 + 1.0, t * c)
    total += c1 * c2 * sum(
        special.comb(n - 1, l, exact=True) * c3 ** (n - 1 - l) * t ** (-l / 2.0)
        * gamma_upper(l / 2.0 + 1.0, t * c)
        for l in range(n)
    )
    return total


def selberg_identity_term(area: float, t: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Identity contribution to the Selberg trace formula for tr(exp(-t Delta))."""
    if not t > 0:
        raise DomainError(f"heat time must be > 0, got t={t}")
    integral = quad_semi_infinite(
        lambda r: math.pi * math.exp(-r * r * t) * float(sech2(math.pi * r)),
        0.0, spec, decay_rate=2.0 * math.pi,
    )
    return area * math.exp(-t / 4.0) / (4.0 * math.pi * t) * integral


def _geodesic_bracket(surface: HyperbolicSurface, T: float) -> float:
    l, v, pi = surface.systole, nu_cached(2), math.pi
    return (1.0 / math.sqrt(T) + (2 * v * v + v * pi) / (math.sqrt(pi) * l)
            + math.sqrt(T) * (4 * v ** 3 + 2 * v * v * pi) / (pi * l * l))


def geodesic_term_envelope(
    surface: HyperbolicSurface, t: float, T: float, trace_at_T: Optional[float] = None
) -> float:
    """
    Bound on the closed-geodesic part of the trace formula at time t <= T.
    With trace_at_T the bound uses that trace value; otherwise the genus form.
    """
    if not (0 < t <= T < surface.window_limit):
        raise WindowError(f"Need 0 < t <= T < {surface.window_limit:.9f}, got t={t}, T={T}")
    l = surface.systole
    expo = T / 4.0 + l * l / (4.0 * T) - l * l / (4.0 * t)
    if trace_at_T is not None:
        return math.sqrt(T / t) * trace_at_T * math.exp(expo)
    return (surface.genus - 1) / math.sqrt(t) * math.exp(expo) * _geodesic_bracket(surface, T)


def spectral_partial_sums(spec: Spectrum, t: float, c: float) -> Tuple[float, float]:
    """(sum over lambda^2 <= c, sum over c < lambda^2 <= max_known) of exp(-lambda^2 t)."""
    if not t > 0:
        raise DomainError(f"heat time must be > 0, got t={t}")
    a = spec.array
    if a.size == 0:
        return 0.0, 0.0
    w = np.exp(-a * t)
    head = float(np.sum(w[a <= c]))
    tail = float(np.sum(w[(a > c) & (a <= spec.max_known)]))
    return head, tail


def heat_trace_bracket(
    spec: Spectrum, surface: HyperbolicSurface, t: float, c: float
) -> BoundPair:
    """Truncated trace and the same plus the integrated remainder bound."""
    head, _ = spectral_partial_sums(spec, t, c)
    rem = surface.area * remainder_upper_surface(LocalGeometry(surface.systole), HeatQuery(t, c))
    return BoundPair(head, head + max(rem, 0.0))


def remainder_curve(
    surface: HyperbolicSurface,
    spec: Spectrum,
    c: float,
    t_grid: Sequence[float],
    on_progress: Optional[Callable[[Dict], None]] = None,
) -> List[Dict[str, float]]:
    """Rows for the remainder plot and the truncated heat-trace approximation."""
    prog = Progress(on_progress)
    geom = LocalGeometry(surface.systole)
    rows: List[Dict[str, float]] = []
    for t in prog.track("heat-remainder", t_grid):
        head, tail = spectral_partial_sums(spec, t, c)
        envelope = surface.area * remainder_upper_surface(geom, HeatQuery(t, c))
        if tail > envelope:
            log.warning("tail sum %.6g exceeds the remainder bound %.6g at t=%g", tail, envelope, t)
        rows.append({
            "t": float(t),
            "remainder_bound": envelope,
            "tail_witness": tail,
            "truncated_trace": head,
            "trace_upper": head + max(envelope, 0.0),
            "identity_term": selberg_identity_term(surface.area, t),
        })
    return rows
