"""
Local Weyl law on manifolds that are hyperbolic near a point.

F'_n is the density whose cosine transform agrees with that of dN_x on (-d, d);
p_a is its asymptotic polynomial and G_n = F_n - p_a the bounded error. The
two-sided bounds below combine these with the Fourier-Tauberian constants nu_m.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import Polynomial
from scipy import special

from .errors import UnsupportedError, ValidationError
from .geometry import BoundPair, Dimension, LocalGeometry
from .nu_constants import nu_cached
from .progress import Progress
from .specfun import (
    DEFAULT_SPEC,
    QuadratureSpec,
    euclidean_ball_volume,
    odd_double_factorial,
    quad_finite,
    quad_semi_infinite,
    tanh_minus_one,
)


N_MAX_POLY = 9
_LAURENT_TERMS = 80


def weyl_constant(dim: Dimension) -> float:
    """omega_n / (2 pi)^n, the leading local Weyl coefficient."""
    return euclidean_ball_volume(dim.n) / (2.0 * math.pi) ** dim.n


def _even_prefactor(m: int) -> float:
    return 2.0 / ((4.0 * math.pi) ** (m + 1) * math.factorial(m))


def _odd_prefactor(m: int) -> float:
    return 2.0 / ((2.0 * math.pi) ** (m + 1) * odd_double_factorial(m))


def _even_shifts(m: int) -> List[float]:
    # tau^2 - m^2 + l^2 - m + l = tau^2 + a_l
    return [l * l + l - m * m - m for l in range(m)]


def _odd_shifts(m: int) -> List[float]:
    return [l * l - m * m for l in range(1, m)]


def f_prime(dim: Dimension, tau):
    """Counting density F'_n(tau). Accepts scalars or arrays; zero below (n-1)/2."""
    t = np.atleast_1d(np.asarray(tau, dtype=float))
    m = dim.m
    out = np.zeros_like(t)
    if dim.is_even:
        on = t > m + 0.5
        tt = t[on]
        s = np.sqrt(tt * tt - (m + 0.5) ** 2)
        val = _even_prefactor(m) * np.tanh(math.pi * s) * tt
        for a in _even_shifts(m):
            val = val * (tt * tt + a)
    else:
        on = t > m
        tt = t[on]
        val = _odd_prefactor(m) * tt * np.sqrt(tt * tt - m * m)
        for a in _odd_shifts(m):
            val = val * (tt * tt + a)
    out[on] = val
    return out if np.ndim(tau) else float(out[0])


# ---------- asymptotic polynomial ----------

@dataclass(frozen=True)
class DensityPolynomial:
    """
    H(tau - heaviside_offset) * sum(coeff * tau**power).
    """
    heaviside_offset: float
    coefficients: Tuple[Tuple[int, float], ...]

    def __post_init__(self) -> None:
        for p, c in self.coefficients:
            if not math.isfinite(c):
                raise ValidationError(f"DensityPolynomial coefficient for tau^{p} is {c}")

    @property
    def poly(self) -> Polynomial:
        deg = max((p for p, _ in self.coefficients), default=0)
        coef = np.zeros(deg + 1)
        for p, c in self.coefficients:
            coef[p] += c
        return Polynomial(coef)

    def __call__(self, tau):
        t = np.asarray(tau, dtype=float)
        out = np.where(t >= self.heaviside_offset, self.poly(t), 0.0)
        return out if out.ndim else float(out)

    def derivative(self) -> "DensityPolynomial":
        return DensityPolynomial.from_poly(self.heaviside_offset, self.poly.deriv())

    @classmethod
    def from_poly(cls, offset: float, poly: Polynomial) -> "DensityPolynomial":
        coefs = tuple((i, float(c)) for i, c in enumerate(poly.coef) if c != 0.0)
        return cls(heaviside_offset=offset, coefficients=coefs)


def _odd_q_coefficients(m: int) -> np.ndarray:
    # F'_{2m+1} = Q(tau) * sqrt(1 - m^2/tau^2), Q = C tau^2 prod(tau^2 + a_l)
    q = Polynomial([0.0, 0.0, _odd_prefactor(m)])
    for a in _odd_shifts(m):
        q = q * Polynomial([a, 0.0, 1.0])
    return q.coef[0::2]


def _sqrt_series(m: int, count: int) -> np.ndarray:
    # sqrt(1 - m^2 x) = sum_j binom(1/2, j) (-m^2)^j x^j
    j = np.arange(count)
    return special.binom(0.5, j) * np.power(-float(m * m), j)


def _density_poly_prime(dim: Dimension) -> Polynomial:
    m = dim.m
    if dim.is_even:
        p = Polynomial([0.0, _even_prefactor(m)])
        for a in _even_shifts(m):
            p = p * Polynomial([a, 0.0, 1.0])
        return p
    q = _odd_q_coefficients(m)
    s = _sqrt_series(m, m + 1)
    coef = np.zeros(2 * m + 1)
    for i, qi in enumerate(q):
        for j in range(i + 1):
            coef[2 * (i - j)] += qi * s[j]
    return Polynomial(coef)


def _odd_laurent_tail(m: int, count: int = _LAURENT_TERMS) -> np.ndarray:
    """b_k, k = 1..count: F' - p_a' = sum b_k tau^{-2k} for tau > m."""
    q = _odd_q_coefficients(m)
    s = _sqrt_series(m, len(q) + count + 1)
    return np.array([sum(qi * s[i + k] for i, qi in enumerate(q)) for k in range(1, count + 1)])


def asymptotic_polynomial(dim: Dimension) -> DensityPolynomial:
    if dim.n > N_MAX_POLY:
        raise UnsupportedError(f"asymptotic polynomial is implemented for n <= {N_MAX_POLY}")
    return DensityPolynomial.from_poly(dim.onset, _density_poly_prime(dim).integ())


# ---------- the error function G_n ----------

def _even_g_integrand(dim: Dimension) -> Callable[[float], float]:
    # in s = sqrt(tau^2 - (m+1/2)^2): tau dtau = s ds
    m = dim.m
    c = _even_prefactor(m)
    shifts = [(m + 0.5) ** 2 + a for a in _even_shifts(m)]

    def g(s: float) -> float:
        val = c * s * float(tanh_minus_one(math.pi * s))
        for a in shifts:
            val *= s * s + a
        return val
    return g


def _odd_g_direct(dim: Dimension) -> Callable[[float], float]:
    dp = _density_poly_prime(dim)
    return lambda tau: float(f_prime(dim, tau)) - float(dp(tau))


def _odd_series_increment(m: int, a: float, b: float, tail: np.ndarray) -> float:
    k = np.arange(1, len(tail) + 1)
    ea = a ** (1.0 - 2 * k)
    eb = 0.0 if math.isinf(b) else b ** (1.0 - 2 * k)
    return float(np.sum(tail * (ea - eb) / (2 * k - 1)))


def g_function(dim: Dimension, tau: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """G_n(tau) = integral of F'_n - p_a' from the onset; continuous with G_n(0) = 0."""
    if tau <= dim.onset:
        return 0.0
    m = dim.m
    if dim.is_even:
        s = math.sqrt(tau * tau - dim.onset ** 2)
        return quad_finite(_even_g_integrand(dim), 0.0, s, spec)
    split = 2.0 * m
    if tau <= split:
        return quad_finite(_odd_g_direct(dim), float(m), tau, spec)
    head = quad_finite(_odd_g_direct(dim), float(m), split, spec)
    return head + _odd_series_increment(m, split, tau, _odd_laurent_tail(m))


def g_norm_oracle(dim: Dimension, spec: QuadratureSpec = DEFAULT_SPEC, samples: int = 60) -> float:
    """
    sup |G_n| by quadrature: the limit at infinity together with a sample of
    intermediate values. Even n is monotone, so the limit decides.
    """
    m = dim.m
    if dim.is_even:
        lim = quad_semi_infinite(_even_g_integrand(dim), 0.0, spec, decay_rate=2.0 * math.pi)
        return abs(lim)
    direct = _odd_g_direct(dim)
    tail = _odd_laurent_tail(m)
    split = 2.0 * m
    best = 0.0
    acc = 0.0
    edges = np.linspace(m, split, samples + 1)
    for a, b in zip(edges[:-1], edges[1:]):
        acc += quad_finite(direct, float(a), float(b), spec)
        best = max(best, abs(acc))
    for tau in np.geomspace(split, 50.0 * split, samples)[1:]:
        best = max(best, abs(acc + _odd_series_increment(m, split, float(tau), tail)))
    return max(best, abs(acc + _odd_series_increment(m, split, math.inf, tail)))


def g_norm(dim: Dimension) -> float:
    """The tabulated bound on sup |G_n|; exact values for n = 2, 3, 4."""
    n, m = dim.n, dim.m
    pi = math.pi
    if n == 2:
        return 1.0 / (48.0 * pi)
    if n == 3:
        return 1.0 / (12.0 * pi ** 2)
    if n == 4:
        return 17.0 / (7680.0 * pi ** 2)
    if dim.is_even:
        first = (2.0 * ((m - 0.5) ** 2 + 1.0 / (4.0 * pi ** 2)) ** m * math.factorial(2 * m + 1)
                 / (pi * (4.0 * pi) ** (m + 2) * math.factorial(m)))
        second = (2.0 * math.factorial(2 * m + 1) * math.exp(pi * (2 * m - 1))
                  / ((16.0 * pi ** 3) ** (m + 1) * math.factorial(m)))
        return min(first, second)
    base = (2.0 * pi) ** (m + 1) * odd_double_factorial(m)
    if m % 2:
        num = (m ** (2 * m + 1) * (1 - m ** 4)
               + math.factorial(2 * m - 1) * m ** 2 * (1 + m ** (2 * m - 2)))
        return abs(num / (base * (1 - m ** 4)))
    # the closed-form even-m expression comes out negative; its magnitude is the bound
    num = (m ** (2 * m + 1) * (1 - m ** 4)
           + math.factorial(2 * m - 1) * m ** 4 * (1 + m ** (2 * m - 4)))
    return abs(num / base)


# ---------- two-sided bounds ----------

def _upper_nu(dim: Dimension) -> float:
    return nu_cached((dim.n + 2) // 2)


def local_counting_upper(dim: Dimension, geom: LocalGeometry, tau: float) -> float:
    n, d = dim.n, geom.d
    v = _upper_nu(dim)
    rem = (n / d) * ((2.0 / math.pi) * v * v + v) * (tau + v / d) ** (n - 1)
    return weyl_constant(dim) * (tau ** n + rem)


def local_counting_lower(dim: Dimension, geom: LocalGeometry, tau: float) -> float:
    n, m, d = dim.n, dim.m, geom.d
    c = weyl_constant(dim)
    if dim.is_even:
        v = nu_cached(m + 2)
        h = m + 0.5
        brace = ((tau - h) ** n - h ** n
                 - (n * v / d) * ((h + v / d) ** (n - 1)
                                  + (2.0 * v / math.pi) * (tau + v / d) ** (n - 1)))
        return -g_norm(dim) + c * brace
    v = nu_cached(m + 1)
    lead = tau ** n if tau <= m else (tau - m) ** n
    rem = ((4 * m + 2) * v * v / (d * math.pi)) * (tau + v / d) ** (n - 1)
    return c * (lead - rem) - g_norm(dim)


def local_counting_bounds(
    dim: Dimension, geom: LocalGeometry, tau: float, clamp: bool = False
) -> BoundPair:
    pair = BoundPair(local_counting_lower(dim, geom, tau), local_counting_upper(dim, geom, tau))
    return pair.clamped() if clamp else pair


def local_counting_bounds_lowdim(
    n: int, geom: LocalGeometry, tau: float, clamp: bool = False
) -> BoundPair:
    """Sharper closed-form bounds for n = 2, 3, 4."""
    d, pi = geom.d, math.pi
    v1, v2, v3 = nu_cached(1), nu_cached(2), nu_cached(3)
    if n == 2:
        up = (tau ** 2 + (4 * v2 ** 2 + 2 * v2 * pi) / (pi * d) * (tau + v2 / d)) / (4 * pi)
        lo = (tau ** 2 - 4 * v2 ** 2 / (pi * d) * (tau + v2 / d) - 1.0 / 12.0) / (4 * pi)
    elif n == 3:
        up = ((tau ** 3 + (6 * v2 ** 2 + 3 * pi * v3) / (pi * d) * (tau + v2 / d) ** 2)
              / (6 * pi ** 2)
              - (tau - 2 * v1 ** 2 / (pi * d)) / (4 * pi ** 2))
        lo = ((tau ** 3 - 6 * v2 ** 2 / (pi * d) * (tau + v2 / d) ** 2) / (6 * pi ** 2)
              - (tau + (2 * v1 ** 2 + pi * v1) / (pi * d)) / (4 * pi ** 2)
              - 1.0 / (12 * pi ** 2))
    elif n == 4:
        up = ((tau ** 4 + (8 * v3 ** 2 + 4 * pi * v3) / (pi * d) * (tau + v3 / d) ** 3)
              / (32 * pi ** 2)
              - (tau ** 2 - 4 * v2 ** 2 / (pi * d) * (tau + v2 / d)) / (8 * pi ** 2))
        lo = ((tau ** 4 - 8 * v3 ** 2 / (pi * d) * (tau + v3 / d) ** 3) / (32 * pi ** 2)
              - (tau ** 2 + (4 * v2 ** 2 + 2 * pi * v2) / (pi * d) * (tau + v2 / d))
              / (8 * pi ** 2)
              - 17.0 / (7680 * pi ** 2))
    else:
        raise UnsupportedError(f"refined counting bounds exist for n in (2, 3, 4), got n={n}")
    pair = BoundPair(lo, up)
    return pair.clamped() if clamp else pair


def global_counting_bounds(
    dim: Dimension, volume: float, systole: float, tau: float, clamp: bool = False
) -> BoundPair:
    """Counting function of a compact hyperbolic manifold: volume x local bounds at d = systole."""
    if not volume > 0:
        raise ValidationError(f"Field 'volume' expected > 0, got {volume!r}")
    pair = local_counting_bounds(dim, LocalGeometry(systole), tau).scaled(volume)
    return pair.clamped() if clamp else pair


def counting_table(
    dim: Dimension,
    geom: LocalGeometry,
    taus: Sequence[float],
    refined: bool = False,
    clamp: bool = False,
    volume: Optional[float] = None,
    on_progress: Optional[Callable[[Dict], None]] = None,
) -> List[Tuple[float, float, float]]:
    """Rows (tau, lower, upper) over a grid; global when a volume is given."""
    prog = Progress(on_progress)
    rows: List[Tuple[float, float, float]] = []
    for tau in prog.track("count", taus):
        if volume is not None:
            pair = global_counting_bounds(dim, volume, geom.d, tau, clamp=clamp)
        elif refined:
            pair = local_counting_bounds_lowdim(dim.n, geom, tau, clamp=clamp)
        else:
            pair = local_counting_bounds(dim, geom, tau, clamp=clamp)
        rows.append((float(tau), pair.lower, pair.upper))
    return rows
