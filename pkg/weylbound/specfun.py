from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Callable, Dict, Mapping, Optional, Tuple

import numpy as np
from scipy import integrate, optimize, special

from .errors import ConvergenceError, DomainError, RootBracketError, ValidationError
from .log import get_logger

log = get_logger(__name__)

EULER_GAMMA = 0.57721566490153286061
TOL_ENV = "WEYLBOUND_TOL"

RealFn = Callable[[float], float]


@dataclass(frozen=True)
class QuadratureSpec:
    """
    Tolerances shared by every adaptive integral in the package.
    """
    abs_tol: float = 1e-10
    rel_tol: float = 1e-9
    max_subdivisions: int = 200

    def __post_init__(self) -> None:
        if not (self.abs_tol > 0) or not math.isfinite(self.abs_tol):
            raise ValidationError(f"Field 'abs_tol' expected > 0, got {self.abs_tol!r}")
        if not (self.rel_tol > 0) or not math.isfinite(self.rel_tol):
            raise ValidationError(f"Field 'rel_tol' expected > 0, got {self.rel_tol!r}")
        if int(self.max_subdivisions) != self.max_subdivisions or self.max_subdivisions < 1:
            raise ValidationError(
                f"Field 'max_subdivisions' expected int >= 1, got {self.max_subdivisions!r}"
            )

    def tolerance_for(self, value: float) -> float:
        return max(self.abs_tol, self.rel_tol * abs(value))

    def tightened(self, factor: float) -> "QuadratureSpec":
        return QuadratureSpec(self.abs_tol * factor, self.rel_tol * factor, self.max_subdivisions)

    @classmethod
    def from_dict(cls, d: Optional[Mapping[str, Any]]) -> "QuadratureSpec":
        if d is None:
            return cls()
        if isinstance(d, cls):
            return d
        if not isinstance(d, Mapping):
            raise ValidationError(f"QuadratureSpec expected a mapping, got {type(d).__name__}")
        try:
            return cls(
                abs_tol=float(d.get("abs_tol", 1e-10)),
                rel_tol=float(d.get("rel_tol", 1e-9)),
                max_subdivisions=int(d.get("max_subdivisions", 200)),
            )
        except (TypeError, ValueError) as e:
            raise ValidationError(f"QuadratureSpec: {e}") from None

    @classmethod
    def parse(cls, text: str) -> "QuadratureSpec":
        """'abs[,rel[,max_subdivisions]]' as accepted by --tol and WEYLBOUND_TOL."""
        parts = [p.strip() for p in text.split(",") if p.strip()]
        if not 1 <= len(parts) <= 3:
            raise ValidationError(f"Tolerance '{text}' expected 'abs[,rel[,max_subdivisions]]'")
        d: Dict[str, Any] = {"abs_tol": parts[0]}
        if len(parts) > 1:
            d["rel_tol"] = parts[1]
        if len(parts) > 2:
            d["max_subdivisions"] = parts[2]
        return cls.from_dict(d)

    @classmethod
    def from_env(cls, environ: Optional[Mapping[str, str]] = None) -> "QuadratureSpec":
        env = os.environ if environ is None else environ
        raw = env.get(TOL_ENV, "").strip()
        return cls.parse(raw) if raw else cls()


DEFAULT_SPEC = QuadratureSpec()


@dataclass(frozen=True)
class ComplexValue:
    re: float
    im: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.re) and math.isfinite(self.im)):
            raise ValidationError(f"ComplexValue expects finite parts, got ({self.re}, {self.im})")

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)

    def conjugate(self) -> "ComplexValue":
        return ComplexValue(self.re, -self.im)

    @classmethod
    def of(cls, z: complex) -> "ComplexValue":
        return cls(float(z.real), float(z.imag))


# ---------- elementary helpers ----------

def euclidean_ball_volume(n: int) -> float:
    if int(n) != n or n < 1:
        raise DomainError(f"Ball volume needs an integer dimension >= 1, got {n!r}")
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)


def odd_double_factorial(m: int) -> int:
    """(2m-1)!!, with (-1)!! = 1."""
    if m < 0:
        raise DomainError(f"Double factorial needs m >= 0, got {m}")
    return math.prod(range(1, 2 * m, 2))


def conjugate_pochhammer(a: float, t, m: int):
    """(a+it)_m (a-it)_m as the real product of (a+k)^2 + t^2. Accepts arrays in t."""
    out = np.ones_like(np.asarray(t, dtype=float))
    t2 = np.asarray(t, dtype=float) ** 2
    for k in range(m):
        out = out * ((a + k) ** 2 + t2)
    return out if out.ndim else float(out)


def tanh_minus_one(x):
    # tanh(x) - 1 without cancellation for large x
    return -2.0 * special.expit(-2.0 * np.asarray(x, dtype=float))


def sech2(x):
    x = np.asarray(x, dtype=float)
    return 4.0 * special.expit(2.0 * x) * special.expit(-2.0 * x)


# ---------- incomplete gamma and exponential integrals ----------

def gamma_upper(s: float, x: float) -> float:
    """Upper incomplete gamma function, integral of e^{-t} t^{s-1} over [x, inf)."""
    if s < 0 or x < 0:
        raise DomainError(f"gamma_upper needs s >= 0 and x >= 0, got s={s}, x={x}")
    if s == 0:
        if x == 0:
            raise DomainError("gamma_upper(0, 0) diverges")
        return float(special.exp1(x))
    if x == 0:
        return float(special.gamma(s))
    return float(special.gamma(s) * special.gammaincc(s, x))


def exp_integral_en(n: int, x: float) -> float:
    if int(n) != n or n < 1:
        raise DomainError(f"E_n needs an integer n >= 1, got {n!r}")
    if x < 0:
        raise DomainError(f"E_n needs x >= 0, got {x}")
    if n == 1 and x == 0:
        raise DomainError("E_1(0) diverges")
    return float(special.expn(int(n), x))


# ---------- quadrature ----------

def quad_finite(
    f: RealFn,
    a: float,
    b: float,
    spec: QuadratureSpec = DEFAULT_SPEC,
    **kw: Any,
) -> float:
    """
    Adaptive QUADPACK integral on [a, b]. Extra keywords (points, weight, wvar)
    go straight to scipy.integrate.quad. Integrable endpoint singularities are fine.
    """
    if a == b:
        return 0.0
    res = integrate.quad(
        f, a, b,
        epsabs=spec.abs_tol, epsrel=spec.rel_tol, limit=spec.max_subdivisions,
        full_output=1, **kw,
    )
    value, err = float(res[0]), float(res[1])
    message = res[3] if len(res) > 3 else None
    if not math.isfinite(value):
        raise ConvergenceError(f"Quadrature on [{a}, {b}] returned {value}")
    if message:
        if err > 100.0 * spec.tolerance_for(value):
            raise ConvergenceError(
                f"Quadrature on [{a}, {b}] stopped at error estimate {err:.3e}: {message}"
            )
        log.debug("quadrature on [%g, %g] accepted with estimate %.3e: %s", a, b, err, message)
    return value


def quad_panels(
    f: RealFn, a: float, b: float, width: float, spec: QuadratureSpec = DEFAULT_SPEC
) -> float:
    """Sum of adaptive integrals over consecutive panels of the given width."""
    if width <= 0:
        raise DomainError(f"Panel width must be > 0, got {width}")
    total = 0.0
    lo = a
    while lo < b:
        hi = min(lo + width, b)
        total += quad_finite(f, lo, hi, spec)
        lo = hi
    return total


def quad_semi_infinite(
    f: RealFn,
    a: float,
    spec: QuadratureSpec = DEFAULT_SPEC,
    decay_rate: Optional[float] = None,
) -> float:
    """
    Integral over [a, inf). With a decay hint r (integrand ~ e^{-r x}) the first
    cutoff is where the analytic tail drops below abs_tol/10; after that panels
    double in width until one contributes less than abs_tol/10.
    """
    if decay_rate is not None and decay_rate > 0:
        width = max(math.log(10.0 / (spec.abs_tol * decay_rate)), 1.0) / decay_rate
    else:
        width = 1.0
    total = quad_finite(f, a, a + width, spec)
    lo = a + width
    for _ in range(60):
        piece = quad_finite(f, lo, lo + width, spec)
        total += piece
        lo += width
        if abs(piece) < spec.abs_tol / 10.0:
            return total
        width *= 2.0
    raise ConvergenceError(
        f"Semi-infinite quadrature from {a} did not settle; last panel contributed {piece:.3e}"
    )


@lru_cache(maxsize=32)
def _leggauss(order: int) -> Tuple[np.ndarray, np.ndarray]:
    return special.roots_legendre(order)


def gauss_legendre_panels(
    a: float, b: float, panels: int = 40, order: int = 24
) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of composite Gauss-Legendre on [a, b]."""
    x, w = _leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def cosine_transform(
    g: RealFn, t: float, support_bound: float, spec: QuadratureSpec = DEFAULT_SPEC
) -> float:
    """h(t) = integral of g(x) cos(tx) over R, for even g supported in (-a, a)."""
    if support_bound <= 0:
        raise DomainError(f"support_bound must be > 0, got {support_bound}")
    t = abs(t)
    if t == 0:
        return 2.0 * quad_finite(g, 0.0, support_bound, spec)
    return 2.0 * quad_finite(g, 0.0, support_bound, spec, weight="cos", wvar=t)


# ---------- root finding ----------

def find_root_bracketed(f: RealFn, a: float, b: float, tol: float = 1e-12) -> float:
    fa, fb = f(a), f(b)
    if fa == 0:
        return a
    if fb == 0:
        return b
    if not (fa * fb < 0):
        raise RootBracketError(f"No sign change on [{a}, {b}]: f(a)={fa:.3e}, f(b)={fb:.3e}")
    root, r = optimize.brentq(f, a, b, xtol=tol, full_output=True)
    if not r.converged:
        raise ConvergenceError(f"brentq on [{a}, {b}] failed: {r.flag}")
    return float(root)


# ---------- Gauss hypergeometric function on the negative axis ----------

_SERIES_MAX_TERMS = 20000
_EULER_W = 0.995
# series terms peak near exp(2 |alpha| sqrt|z|); past this the sums cancel
_SERIES_GROWTH = 16.0
_ODE_START_GROWTH = 4.0


def _series_conjugate(alpha: complex, c: float, z: float) -> float:
    # (alpha)_k (conj alpha)_k = prod |alpha + j|^2, so every term is real
    a, b = alpha.real, alpha.imag
    term, total = 1.0, 1.0
    for k in range(_SERIES_MAX_TERMS):
        term *= ((a + k) ** 2 + b * b) / ((c + k) * (k + 1.0)) * z
        total += term
        if abs(term) <= 1e-17 * max(abs(total), 1e-300) and k > 2:
            return total
    raise ConvergenceError(f"2F1 series at z={z} did not converge in {_SERIES_MAX_TERMS} terms")


def _pfaff(alpha: complex, c: float, z: float) -> float:
    # 2F1(a, conj a; c; z) = (1-z)^{-a} 2F1(a, c - conj a; c; z/(z-1))
    w = z / (z - 1.0)
    beta = c - alpha.conjugate()
    term = 1.0 + 0j
    total = 1.0 + 0j
    for k in range(_SERIES_MAX_TERMS):
        term *= (alpha + k) * (beta + k) / ((c + k) * (k + 1.0)) * w
        total += term
        if abs(term) <= 1e-17 * max(abs(total), 1e-300) and k > 2:
            return float(((1.0 - z) ** (-alpha) * total).real)
    raise ConvergenceError(
        f"2F1 Pfaff series at z={z} (w={w:.6f}) did not converge in {_SERIES_MAX_TERMS} terms"
    )


def _euler_integral(alpha: complex, c: float, z: float, spec: QuadratureSpec) -> float:
    # Gamma(c)/(Gamma(alpha) Gamma(c-alpha)) * int t^{alpha-1}(1-t)^{c-alpha-1}(1-zt)^{-conj alpha}
    a, b = alpha.real, alpha.imag

    def phase(t: float) -> float:
        t = min(max(t, 1e-300), 1.0 - 1e-16)
        return b * (math.log(t) - math.log1p(-t) + math.log1p(-z * t))

    def modulus(t: float) -> float:
        return (1.0 - z * t) ** (-a)

    wvar = (a - 1.0, c - a - 1.0)
    re = quad_finite(lambda t: modulus(t) * math.cos(phase(t)), 0.0, 1.0, spec,
                     weight="alg", wvar=wvar)
    im = quad_finite(lambda t: modulus(t) * math.sin(phase(t)), 0.0, 1.0, spec,
                     weight="alg", wvar=wvar)
    pref = special.gamma(c) / (special.gamma(alpha) * special.gamma(c - alpha))
    return float((pref * complex(re, im)).real)


def _hypergeometric_ode(alpha: complex, c: float, z: float, spec: QuadratureSpec) -> float:
    # z(1-z) F'' + (c - (2 Re alpha + 1) z) F' - |alpha|^2 F = 0 in u = log(1 - z),
    # state (F, dF/du), started from the series at a z0 where it does not cancel
    ab, apb = abs(alpha) ** 2, 2.0 * alpha.real
    z0 = -((_ODE_START_GROWTH / (2.0 * abs(alpha))) ** 2)
    f0 = _series_conjugate(alpha, c, z0)
    fz0 = ab / c * _series_conjugate(alpha + 1.0, c + 1.0, z0)

    def rhs(u: float, y: np.ndarray) -> np.ndarray:
        zz = -math.expm1(u)
        f, p = y
        return np.array([p, p + ((1.0 - zz) * ab * f + (c - (apb + 1.0) * zz) * p) / zz])

    sol = integrate.solve_ivp(
        rhs, (math.log1p(-z0), math.log1p(-z)), [f0, -(1.0 - z0) * fz0],
        method="DOP853", rtol=max(1e-2 * spec.rel_tol, 1e-13), atol=1e-3 * spec.abs_tol,
    )
    if not sol.success:
        raise ConvergenceError(f"2F1 equation from z={z0:.3g} to z={z} failed: {sol.message}")
    return float(sol.y[0, -1])


def hyp2f1_neg_axis(
    m_plus_it: ComplexValue,
    m_minus_it: ComplexValue,
    c: float,
    z: float,
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> float:
    """
    2F1(alpha, conj alpha; c; z) for z <= 0. The value is real.

    Defining series for |z| < 0.75. Beyond that the Pfaff transform is summed while
    w = z/(z-1) <= 0.995; further out the Euler integral is used when c > Re alpha > 0.
    When |alpha| is large against |z| (or w) the series terms grow like
    exp(2 |alpha| sqrt|z|) and cancel, and the Euler prefactor grows with Im alpha;
    there the hypergeometric equation is integrated from a small |z0| instead.
    """
    alpha = m_plus_it.value
    if abs(m_minus_it.re - alpha.real) > 1e-14 * max(1.0, abs(alpha.real)) or \
            abs(m_minus_it.im + alpha.imag) > 1e-14 * max(1.0, abs(alpha.imag)):
        raise DomainError(f"Upper parameters {m_plus_it} and {m_minus_it} are not conjugate")
    if not c > 0:
        raise DomainError(f"2F1 lower parameter must be > 0, got {c}")
    if z > 0:
        raise DomainError(f"2F1 evaluated only on z <= 0, got {z}")
    if z == 0:
        return 1.0
    w = z / (z - 1.0)
    reach = abs(z) if abs(z) < 0.75 else w
    if 2.0 * abs(alpha) * math.sqrt(reach) > _SERIES_GROWTH:
        return _hypergeometric_ode(alpha, c, z, spec)
    if abs(z) < 0.75:
        return _series_conjugate(alpha, c, z)
    if w > _EULER_W and c > alpha.real > 0:
        return _euler_integral(alpha, c, z, spec)
    return _pfaff(alpha, c, z)
