"""
Two-sided bounds on the zeta-regularised determinant of the Laplacian on a closed
hyperbolic surface.

zeta'(0) = L1 + L2 + L3, where L1 is the eigenvalue sum of Gamma(0, eps*lambda^2),
L2 is the identity contribution and L3 the geodesic one. L1 is split at a level c
up to which the spectrum is known; the part above c is bounded through the heat
remainder, and L3 through the geodesic envelope of the trace formula.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence

from scipy import special

from .errors import DomainError, ValidationError, WindowError
from .geometry import BoundPair, HyperbolicSurface, LocalGeometry
from .log import get_logger
from .nu_constants import nu_cached
from .progress import Progress
from .specfun import (
    DEFAULT_SPEC,
    EULER_GAMMA,
    QuadratureSpec,
    gamma_upper,
    quad_semi_infinite,
    sech2,
)
from .spectrum import Spectrum
from .weyl_counting import local_counting_bounds_lowdim

log = get_logger(__name__)


@dataclass(frozen=True)
class DetQuery:
    surface: HyperbolicSurface
    spectrum: Spectrum
    c: float
    eps: float
    T: float

    def __post_init__(self) -> None:
        if not (self.c > 0) or not math.isfinite(self.c):
            raise DomainError(f"DetQuery needs c > 0, got {self.c!r}")
        self.surface.check_window(self.eps, self.T)
        self.spectrum.check_complete(self.c)


@dataclass(frozen=True)
class DetResult:
    query: DetQuery
    l1_head: float
    l1_tail: float
    l2: float
    l3: float
    neg_log_det: BoundPair
    det: BoundPair

    def contains(self, value: float) -> bool:
        return self.det.contains(value)

    def as_dict(self) -> Dict[str, float]:
        q = self.query
        return {
            "c": q.c, "eps": q.eps, "T": q.T,
            "l1_head": self.l1_head, "l1_tail_bound": self.l1_tail,
            "l2": self.l2, "l3_bound": self.l3,
            "neg_log_det_lower": self.neg_log_det.lower,
            "neg_log_det_upper": self.neg_log_det.upper,
            "det_lower": self.det.lower, "det_upper": self.det.upper,
        }


def l1_head(spectrum: Spectrum, c: float, eps: float) -> float:
    """Sum of Gamma(0, eps*lambda^2) over the nonzero eigenvalues up to c."""
    if not eps > 0:
        raise DomainError(f"eps must be > 0, got {eps}")
    vals = spectrum.nonzero_upto(c)
    if vals.size == 0:
        return 0.0
    return float(special.exp1(eps * vals).sum())


def l1_tail_bound(surface: HyperbolicSurface, c: float, eps: float) -> float:
    """Bound on the integral of t^{-1} R_t^c over [eps, inf), integrated over the surface."""
    if not (c > 0 and eps > 0):
        raise DomainError(f"l1_tail_bound needs c > 0 and eps > 0, got c={c}, eps={eps}")
    l, v, pi = surface.systole, nu_cached(2), math.pi
    poly = (-c + math.sqrt(c) * 4 * v * v / (pi * l)
            + (8 * v ** 3 + 2 * v * v * pi) / (pi * l * l) + 1.0 / 12.0)
    ce = c * eps
    total = (poly * gamma_upper(0.0, ce)
             + math.exp(-ce) / eps
             + gamma_upper(0.5, ce) * (4 * v * v + 2 * v * pi) / (math.sqrt(eps) * pi * l))
    return (surface.genus - 1) * total


def _l2_integrand(eps: float) -> Callable[[float], float]:
    def f(r: float) -> float:
        s = r * r + 0.25
        x = eps * s
        return float(sech2(math.pi * r)) * (
            (1.0 - special.expn(2, x)) / eps + s * (EULER_GAMMA - 1.0 + math.log(x))
        )
    return f


def l2_term(surface: HyperbolicSurface, eps: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    if not eps > 0:
        raise DomainError(f"eps must be > 0, got {eps}")
    area = surface.area
    integral = quad_semi_infinite(_l2_integrand(eps), 0.0, spec, decay_rate=2.0 * math.pi)
    return (-area / (4 * math.pi * eps)
            - (area / (12 * math.pi) + 1.0) * (EULER_GAMMA + math.log(eps))
            + area / 4.0 * integral)


def l3_bound(surface: HyperbolicSurface, eps: float, T: float) -> float:
    surface.check_window(eps, T)
    l, v, pi = surface.systole, nu_cached(2), math.pi
    bracket = (1.0 / math.sqrt(T) + (2 * v * v + v * pi) / (math.sqrt(pi) * l)
               + math.sqrt(T) * (4 * v ** 3 + 2 * v * v * pi) / (pi * l * l))
    return ((surface.genus - 1) / l * math.exp(T / 4.0 + l * l / (4.0 * T)) * bracket
            * gamma_upper(0.5, l * l / (4.0 * eps)))


def count_consistency(surface: HyperbolicSurface, spectrum: Spectrum, c: float) -> BoundPair:
    """
    Global counting bracket at lambda = sqrt(c). A warning is logged when the
    number of listed eigenvalues up to c falls outside it.
    """
    pair = local_counting_bounds_lowdim(
        2, LocalGeometry(surface.systole), math.sqrt(c)
    ).scaled(surface.area)
    count = spectrum.count_upto(c)
    if not pair.contains(count):
        log.warning(
            "eigenvalue list has %d values up to c=%g, outside the counting bracket [%.3f, %.3f]",
            count, c, pair.lower, pair.upper,
        )
    return pair


def det_bounds(q: DetQuery, spec: QuadratureSpec = DEFAULT_SPEC) -> DetResult:
    count_consistency(q.surface, q.spectrum, q.c)
    head = l1_head(q.spectrum, q.c, q.eps)
    tail = l1_tail_bound(q.surface, q.c, q.eps)
    l2 = l2_term(q.surface, q.eps, spec)
    l3 = l3_bound(q.surface, q.eps, q.T)
    neg = BoundPair(l2 + head - l3, l2 + head + tail + l3)
    det = BoundPair(math.exp(-neg.upper), math.exp(-neg.lower))
    log.debug("det bounds c=%g eps=%g T=%g: head=%.9g tail=%.9g L2=%.9g L3=%.9g",
              q.c, q.eps, q.T, head, tail, l2, l3)
    return DetResult(q, head, tail, l2, l3, neg, det)


def sweep_det_bounds(
    surface: HyperbolicSurface,
    spectrum: Spectrum,
    c: float,
    eps_grid: Sequence[float],
    T_grid: Sequence[float],
    on_progress: Optional[Callable[[Dict], None]] = None,
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> List[Dict[str, float]]:
    """
    Evaluate det_bounds on an (eps, T) grid. Points outside the admissible window are
    skipped; the row with the narrowest det bracket carries best = 1.
    """
    spectrum.check_complete(c)
    prog = Progress(on_progress)
    rows: List[Dict[str, float]] = []
    grid = list(itertools.product(eps_grid, T_grid))
    for eps, T in prog.track("detzeta", grid):
        try:
            res = det_bounds(DetQuery(surface, spectrum, c, eps, T), spec)
        except WindowError:
            log.debug("skipping eps=%g T=%g outside the window", eps, T)
            continue
        row = res.as_dict()
        row["best"] = 0
        rows.append(row)
    if not rows:
        raise ValidationError(
            f"No (eps, T) grid point satisfies 0 < eps <= T < {surface.window_limit:.6f}"
        )
    best = min(rows, key=lambda r: r["det_upper"] - r["det_lower"])
    best["best"] = 1
    return rows
