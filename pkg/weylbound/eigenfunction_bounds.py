"""
Pointwise bounds for L^2-normalised eigenfunctions: |phi|^2, |grad phi|^2 in any
dimension, and |nabla^l phi|^2 on hyperbolic surfaces.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

import numpy as np

from .errors import UnsupportedError
from .geometry import BoundPair, Dimension, EigenfunctionQuery, LocalGeometry
from .nu_constants import M_MAX, nu_cached
from .specfun import (
    QuadratureSpec,
    euclidean_ball_volume,
    odd_double_factorial,
    quad_semi_infinite,
    tanh_minus_one,
)
from .weyl_counting import f_prime, g_norm


# Coefficients c_k of |tau|^{2k+3} in the surface densities of order l.
SURFACE_COEFFICIENTS: Dict[int, Tuple[int, ...]] = {
    1: (1,),
    2: (1, 1),
    3: (4, 3, 1),
    4: (32, 23, 6, 1),
    5: (328, 280, 75, 10, 1),
    6: (5752, 5040, 1399, 185, 15, 1),
    7: (140944, 125864, 36096, 4893, 385, 21, 1),
    8: (4883472, 4419704, 1299288, 181275, 7231, 189, 15, 1),
}

TABULATED_SURFACE_G: Dict[int, float] = {
    1: 17.0 / (1920.0 * math.pi),
    2: 29.0 / (1260.0 * math.pi),
    3: 2467.0 / (26880.0 * math.pi),
}

MOMENT_SPEC = QuadratureSpec(abs_tol=1e-12, rel_tol=1e-12, max_subdivisions=400)


@dataclass(frozen=True)
class SurfaceDensityTable:
    l: int
    coefficients: Tuple[Tuple[int, int], ...]

    @classmethod
    def for_order(cls, l: int) -> "SurfaceDensityTable":
        _check_order(l)
        return cls(l, tuple((2 * k + 3, c) for k, c in enumerate(SURFACE_COEFFICIENTS[l])))

    def asymptotic_monomials(self) -> List[Tuple[int, float]]:
        """(power, coefficient) of the Taylor part: (1/2pi) c tau^{p+1}/(p+1)."""
        return [(p + 1, c / (2.0 * math.pi * (p + 1))) for p, c in self.coefficients]


def _check_order(l: int) -> None:
    if l not in SURFACE_COEFFICIENTS:
        raise UnsupportedError(f"surface derivative order must be in 1..8, got l={l!r}")


# ---------- |phi|^2 and |grad phi|^2 ----------

def sup_bound(q: EigenfunctionQuery) -> float:
    n, d = q.dim.n, q.geom.d
    v = nu_cached((n + 2) // 2)
    lead = 8.0 * n * v * v * euclidean_ball_volume(n) / (d * (2.0 * math.pi) ** (n + 1))
    return lead * (q.lam + v / d) ** (n - 1) + g_norm(q.dim)


def f1_prime(dim: Dimension, tau):
    """Density for the first-derivative counting function: F'_n with tau^3 in place of tau."""
    t = np.asarray(tau, dtype=float)
    out = np.asarray(f_prime(dim, t), dtype=float) * t * t
    return out if out.ndim else float(out)


def g1_norm(dim: Dimension) -> float:
    n, m = dim.n, dim.m
    pi = math.pi
    if n == 2:
        return 17.0 / (1920.0 * pi)
    if n == 3:
        return 11.0 / (240.0 * pi ** 2)
    if n == 4:
        return 367.0 / (64512.0 * pi ** 2)
    if dim.is_even:
        fact = math.factorial(2 * m + 3) / math.factorial(m)
        base = (m - 0.5) ** 2 + 1.0 / (4.0 * pi ** 2)
        first = 2.0 * base ** m * fact / (pi * (4.0 * pi) ** (m + 4))
        second = math.exp(2.0 * pi * (m + 0.5)) * fact * pi ** (2 * m + 5) / 2.0 ** (4 * m + 5)
        return min(first, second)
    tail_pow = m ** 4 * (1 + m ** (2 * m - 2)) if m % 2 else m ** 6 * (1 + m ** (2 * m - 4))
    num = m ** (2 * m + 3) * (1 - m ** 4) + math.factorial(2 * m - 1) * tail_pow
    den = (2.0 * pi) ** (m + 1) * odd_double_factorial(m) * (1 - m ** 4)
    return abs(11.0 / 60.0 * num / den)


def grad_bound(q: EigenfunctionQuery) -> float:
    n, d = q.dim.n, q.geom.d
    v = nu_cached((n + 4) // 2)
    lead = 8.0 * (n + 2) * v * v * euclidean_ball_volume(n) / (d * (2.0 * math.pi) ** (n + 1))
    return lead * (q.lam + v / d) ** (n + 1) + g1_norm(q.dim)


def grad_bound_preset(n: int, geom: LocalGeometry, lam: float) -> float:
    """Closed-form gradient bounds for n = 2, 3, 4."""
    d, pi = geom.d, math.pi
    if n == 2:
        v = nu_cached(3)
        return 4 * v * v / (d * pi ** 2) * (lam + v / d) ** 3 + 17.0 / (1920 * pi)
    if n == 3:
        v = nu_cached(3)
        return 10 * v * v / (3 * d * pi ** 3) * (lam + v / d) ** 4 + 11.0 / (240 * pi ** 2)
    if n == 4:
        v = nu_cached(4)
        return 3 * v * v / (4 * d * pi ** 3) * (lam + v / d) ** 5 + 367.0 / (64512 * pi ** 2)
    raise UnsupportedError(f"gradient presets exist for n in (2, 3, 4), got n={n}")


# ---------- surfaces: densities and error constants ----------

def surface_density_fprime(l: int, tau):
    _check_order(l)
    t = np.abs(np.asarray(tau, dtype=float))
    on = t * t > 0.25
    s = np.sqrt(np.where(on, t * t - 0.25, 0.0))
    poly = np.zeros_like(t)
    for k, c in enumerate(SURFACE_COEFFICIENTS[l]):
        poly = poly + c * t ** (2 * k + 3)
    out = np.where(on, np.tanh(math.pi * s) * poly / (2.0 * math.pi), 0.0)
    return out if out.ndim else float(out)


def tanh_moment(k: int, spec: QuadratureSpec = MOMENT_SPEC) -> float:
    """
    I_k = integral over [1/2, inf) of tau^{2k+1} (tanh(pi sqrt(tau^2 - 1/4)) - 1).

    With s = sqrt(tau^2 - 1/4) this is the integral of (s^2 + 1/4)^k s (tanh(pi s) - 1)
    over [0, inf), which has no endpoint singularity.
    """
    if int(k) != k or not 1 <= k <= 8:
        raise UnsupportedError(f"tanh_moment is defined for 1 <= k <= 8, got k={k!r}")

    def f(s: float) -> float:
        return (s * s + 0.25) ** k * s * float(tanh_minus_one(math.pi * s))
    return quad_semi_infinite(f, 0.0, spec, decay_rate=2.0 * math.pi)


def _onset_jump(l: int) -> float:
    return sum(c * 0.5 ** (2 * k + 4) / (2 * k + 4)
               for k, c in enumerate(SURFACE_COEFFICIENTS[l])) / (2.0 * math.pi)


@lru_cache(maxsize=None)
def surface_gl_constant(l: int) -> float:
    """
    sup |G_2^l| from the moment integrals. For l >= 2 the error function is measured
    against the unshifted Taylor polynomial, so the value of that polynomial at the
    onset tau = 1/2 adds to the tail; for l = 1 the error function is continuous.
    """
    _check_order(l)
    tail = sum(c * abs(tanh_moment(k + 1))
               for k, c in enumerate(SURFACE_COEFFICIENTS[l])) / (2.0 * math.pi)
    return tail + (_onset_jump(l) if l >= 2 else 0.0)


def surface_gl_report(l: int) -> Dict[str, object]:
    oracle = surface_gl_constant(l)
    tabulated = TABULATED_SURFACE_G.get(l)
    rel = None if tabulated is None else (tabulated - oracle) / oracle
    return {"l": l, "oracle": oracle, "tabulated": tabulated, "relative_gap": rel}


# ---------- surfaces: counting bounds for N^l and |nabla^l phi|^2 ----------

def _nu_for_power(p: int) -> float:
    m = p // 2 + 1
    if m > M_MAX:
        raise UnsupportedError(
            f"tau^{p} needs nu_{m}, but nu_m is implemented only for m <= {M_MAX}"
        )
    return nu_cached(m)


def surface_nl_bounds(l: int, geom: LocalGeometry, tau: float) -> BoundPair:
    """Closed-form bounds on N^l_2 for l = 2, 3."""
    d, pi = geom.d, math.pi
    v3, v4 = nu_cached(3), nu_cached(4)
    if l == 2:
        g = 29.0 / (1260 * pi)
        up = ((tau ** 6 + (12 * v4 ** 2 + 6 * pi * v4) / (pi * d) * (tau + v4 / d) ** 5) / (12 * pi)
              + (tau ** 4 + (8 * v3 ** 2 + 4 * pi * v3) / (d * pi) * (tau + v3 / d) ** 3) / (8 * pi)
              + g)
        lo = ((tau ** 6 - 12 * v4 ** 2 / (pi * d) * (tau + v4 / d) ** 5) / (12 * pi)
              + (tau ** 4 - 8 * v3 ** 2 / (d * pi) * (tau + v3 / d) ** 3) / (8 * pi)
              - g)
        return BoundPair(lo, up)
    if l == 3:
        v5 = nu_cached(5)
        g = 2467.0 / (26880 * pi)
        up = (
            (tau ** 8 + (16 * v5 ** 2 + 8 * pi * v5) / (pi * d) * (tau + v5 / d) ** 7) / (16 * pi)
            + (tau ** 6 + (12 * v4 ** 2 + 6 * pi * v4) / (pi * d) * (tau + v4 / d) ** 5) / (4 * pi)
            + (tau ** 4 + (8 * v3 ** 2 + 4 * pi * v3) / (d * pi) * (tau + v3 / d) ** 3) / (2 * pi)
            + g
        )
        lo = ((tau ** 8 - 16 * v5 ** 2 / (pi * d) * (tau + v5 / d) ** 7) / (16 * pi)
              + (tau ** 6 - 12 * v4 ** 2 / (pi * d) * (tau + v4 / d) ** 5) / (4 * pi)
              + (tau ** 4 - 8 * v3 ** 2 / (d * pi) * (tau + v3 / d) ** 3) / (2 * pi)
              - g)
        return BoundPair(lo, up)
    raise UnsupportedError(f"closed-form N^l bounds exist for l in (2, 3), got l={l}")


def surface_deriv_bound(l: int, geom: LocalGeometry, lam: float) -> float:
    d, pi = geom.d, math.pi
    v3, v4 = nu_cached(3), nu_cached(4)
    if l == 2:
        return ((24 * v4 ** 2 + 6 * pi * v4) / (pi * d) * (lam + v4 / d) ** 5 / (12 * pi)
                + (16 * v3 ** 2 + 4 * pi * v3) / (d * pi) * (lam + v3 / d) ** 3 / (8 * pi)
                + 29.0 / (630 * pi))
    if l == 3:
        v5 = nu_cached(5)
        return ((4 * v5 ** 2 + pi * v5) * (lam + v5 / d) ** 7
                + (12 * v4 ** 2 + 3 * pi * v4) * (lam + v4 / d) ** 5
                + (16 * v3 ** 2 + 4 * pi * v3) * (lam + v3 / d) ** 3) / (2 * pi ** 2 * d) \
            + 2467.0 / (13440 * pi)
    raise UnsupportedError(f"closed-form derivative bounds exist for l in (2, 3), got l={l}")


def _g_for_assembly(l: int) -> float:
    tabulated = TABULATED_SURFACE_G.get(l)
    return surface_gl_constant(l) if tabulated is None else tabulated


def assembled_surface_bounds(
    l: int, geom: LocalGeometry, tau: float, g_value: Optional[float] = None
) -> BoundPair:
    """
    Bounds on N^l_2 assembled monomial by monomial: a tau^p contributes
    a (tau^p +- p (2 nu^2 [+ pi nu]) / (pi d) (tau + nu/d)^{p-1}) with nu = nu_{p/2+1}.
    Reproduces the closed-form l = 2, 3 bounds; other orders are an extrapolation.
    """
    table = SurfaceDensityTable.for_order(l)
    d, pi = geom.d, math.pi
    g = _g_for_assembly(l) if g_value is None else g_value
    up = lo = 0.0
    for p, a in table.asymptotic_monomials():
        v = _nu_for_power(p)
        shift = (tau + v / d) ** (p - 1)
        up += a * (tau ** p + p * (2 * v * v + pi * v) / (pi * d) * shift)
        lo += a * (tau ** p - p * 2 * v * v / (pi * d) * shift)
    return BoundPair(lo - g, up + g)


def surface_deriv_bound_assembled(
    l: int, geom: LocalGeometry, lam: float, g_value: Optional[float] = None
) -> float:
    table = SurfaceDensityTable.for_order(l)
    d, pi = geom.d, math.pi
    g = _g_for_assembly(l) if g_value is None else g_value
    total = 2.0 * g
    for p, a in table.asymptotic_monomials():
        v = _nu_for_power(p)
        total += a * p * (4 * v * v + pi * v) / (pi * d) * (lam + v / d) ** (p - 1)
    return total


def eigenfunction_bound(q: EigenfunctionQuery, deriv: int = 0) -> float:
    """|nabla^deriv phi(x)|^2 bound; orders 2 and 3 exist only on surfaces."""
    if deriv == 0:
        return sup_bound(q)
    if deriv == 1:
        return grad_bound(q)
    if deriv in (2, 3):
        if q.dim.n != 2:
            raise UnsupportedError(f"derivative order {deriv} is available only for n = 2")
        return surface_deriv_bound(deriv, q.geom, q.lam)
    raise UnsupportedError(f"derivative order must be 0..3, got {deriv}")


def surface_table(l_values: Tuple[int, ...] = tuple(range(1, 9)),
                  taus: Tuple[float, ...] = (1.0, 2.0, 5.0)) -> List[Dict[str, object]]:
    rows: List[Dict[str, object]] = []
    for l in l_values:
        row: Dict[str, object] = {
            "l": l,
            "coefficients": " ".join(str(c) for c in SURFACE_COEFFICIENTS[l]),
            "g_oracle": surface_gl_constant(l),
            "g_tabulated": TABULATED_SURFACE_G.get(l, float("nan")),
        }
        for t in taus:
            row[f"density@{t:g}"] = surface_density_fprime(l, t)
        rows.append(row)
    return rows
