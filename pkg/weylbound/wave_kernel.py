"""
Shifted wave kernels paired with an even test function g, their diagonal values and
the generalised Mehler-Fock transform pair on hyperbolic space.

A test function is carried by its profile G with g(x) = G(x^2). The kernels are
functions of the point-pair invariant u = sinh^2(rho/2). With
Gt(v) = g(2 arcsinh sqrt v) = G(r(v)), r = rho^2:

    odd  n = 2m+1:  k_n(u) = (-4 pi)^{-m} Gt^{(m)}(u)
    even n = 2m+2:  k_n(u) = (-4 pi)^{-m} * (-1/2) int_0^inf Gt^{(m+1)}(u + s^2) ds

The even formula is the Abel integral of g' against (cosh t - cosh rho)^{-1/2}
rewritten in v = sinh^2(t/2).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import integrate

from .errors import ConvergenceError, DomainError, UnsupportedError, ValidationError
from .geometry import Dimension
from .log import get_logger
from .progress import Progress
from .specfun import (
    DEFAULT_SPEC,
    ComplexValue,
    QuadratureSpec,
    conjugate_pochhammer,
    euclidean_ball_volume,
    gauss_legendre_panels,
    hyp2f1_neg_axis,
    odd_double_factorial,
    quad_finite,
)
from .weyl_counting import f_prime

log = get_logger(__name__)

Profile = Callable[[np.ndarray], np.ndarray]
Evaluator = Callable[[np.ndarray], np.ndarray]

M_KERNEL_MAX = 2
ROUNDTRIP_SPEC = QuadratureSpec(abs_tol=1e-6, rel_tol=1e-6)
_SERIES_U = 1e-4
_MAX_DOUBLINGS = 6
_ROW_CHUNK = 1024
_GL_ORDER = 24


# ---------- test functions ----------

@dataclass(frozen=True)
class TestFunction:
    """Even, compactly supported g through its profile G(s) = g(sqrt s) and G', G''."""
    __test__ = False

    profile: Profile
    profile_d1: Profile
    profile_d2: Profile
    support: float
    label: str = "g"

    def __post_init__(self) -> None:
        if not (self.support > 0) or not math.isfinite(self.support):
            raise ValidationError(f"TestFunction support must be > 0, got {self.support!r}")

    def g(self, x):
        x = np.asarray(x, dtype=float)
        return self.profile(x * x)

    def g_prime(self, x):
        x = np.asarray(x, dtype=float)
        return 2.0 * x * self.profile_d1(x * x)

    def composed(self, u, order: int = 0) -> np.ndarray:
        """d^order/du^order of g(2 arcsinh sqrt u), order 0..2."""
        u = np.asarray(u, dtype=float)
        r, r1, r2 = _r_derivatives(u)
        if order == 0:
            return self.profile(r)
        if order == 1:
            return self.profile_d1(r) * r1
        if order == 2:
            return self.profile_d2(r) * r1 * r1 + self.profile_d1(r) * r2
        raise UnsupportedError(f"profile derivatives exist up to order 2, got {order}")

    @property
    def u_support(self) -> float:
        return math.sinh(self.support / 2.0) ** 2

    def transform(self, ts) -> np.ndarray:
        """h(t) = integral of g(x) cos(tx) over R."""
        return cosine_transform_nodes(self.g, ts, self.support)


def bump(a: float = 1.0, k: float = 1.0) -> TestFunction:
    """g(x) = exp(-k a^2 / (a^2 - x^2)) on |x| < a."""
    if not (a > 0 and k > 0):
        raise ValidationError(f"bump needs a > 0 and k > 0, got a={a}, k={k}")
    a2 = a * a

    def _parts(s):
        s = np.asarray(s, dtype=float)
        inside = s < a2
        q = np.where(inside, a2 - s, 1.0)
        G = np.where(inside, np.exp(-k * a2 / q), 0.0)
        return s, inside, q, G

    def G0(s):
        return _parts(s)[3]

    def G1(s):
        _, inside, q, G = _parts(s)
        return np.where(inside, -k * a2 / (q * q) * G, 0.0)

    def G2(s):
        _, inside, q, G = _parts(s)
        p = k * a2 / (q * q)
        return np.where(inside, (p * p - 2.0 * k * a2 / q ** 3) * G, 0.0)

    return TestFunction(G0, G1, G2, a, label=f"bump(a={a:g},k={k:g})")


@dataclass(frozen=True)
class PointPairInvariant:
    u: float

    def __post_init__(self) -> None:
        if not (self.u >= 0) or not math.isfinite(self.u):
            raise DomainError(f"Point-pair invariant needs u >= 0, got {self.u!r}")

    @property
    def rho(self) -> float:
        return 2.0 * math.asinh(math.sqrt(self.u))

    @classmethod
    def from_rho(cls, rho: float) -> "PointPairInvariant":
        return cls(math.sinh(rho / 2.0) ** 2)


def _as_u(u: Union[PointPairInvariant, float]) -> float:
    return u.u if isinstance(u, PointPairInvariant) else PointPairInvariant(float(u)).u


def _r_derivatives(u: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    # r(u) = rho(u)^2 = 4 arcsinh(sqrt u)^2 and its first two derivatives
    u = np.atleast_1d(u)
    r, r1, r2 = (np.empty_like(u) for _ in range(3))
    small = u < _SERIES_U
    us = u[small]
    r[small] = 4 * us - 4 / 3 * us ** 2 + 32 / 45 * us ** 3 - 16 / 35 * us ** 4
    r1[small] = 4 - 8 / 3 * us + 32 / 15 * us ** 2 - 64 / 35 * us ** 3
    r2[small] = -8 / 3 + 64 / 15 * us - 192 / 35 * us ** 2
    ul = u[~small]
    q = ul + ul * ul
    rho = 2.0 * np.arcsinh(np.sqrt(ul))
    r[~small] = rho * rho
    r1[~small] = 2.0 * rho / np.sqrt(q)
    r2[~small] = 2.0 / q - rho * (1.0 + 2.0 * ul) / q ** 1.5
    return r, r1, r2


# ---------- kernels ----------

def _check_m(m: int) -> None:
    if int(m) != m or not 0 <= m <= M_KERNEL_MAX:
        raise UnsupportedError(f"kernels are available for m in 0..{M_KERNEL_MAX}, got {m!r}")


def odd_kernel_values(g: TestFunction, us, m: int) -> np.ndarray:
    _check_m(m)
    return g.composed(us, m) / (-4.0 * math.pi) ** m


def kernel_odd(g: TestFunction, u: Union[PointPairInvariant, float], m: int) -> float:
    """k_{2m+1}(u) for m = 0, 1, 2."""
    return float(odd_kernel_values(g, np.array([_as_u(u)]), m)[0])


def even_kernel_values(g: TestFunction, us, m: int, panels: int = 20) -> np.ndarray:
    """Vectorized k_{2m+2}(u) by composite Gauss-Legendre in s, m = 0 or 1."""
    if m not in (0, 1):
        raise UnsupportedError(f"even kernels are available for m in (0, 1), got {m!r}")
    us = np.atleast_1d(np.asarray(us, dtype=float))
    span = np.sqrt(np.clip(g.u_support - us, 0.0, None))
    x, w = gauss_legendre_panels(0.0, 1.0, panels, _GL_ORDER)
    s = span[:, None] * x[None, :]
    vals = g.composed((us[:, None] + s * s).ravel(), m + 1).reshape(s.shape)
    integral = (vals * w[None, :]).sum(axis=1) * span
    return -0.5 * integral / (-4.0 * math.pi) ** m


def kernel_even(
    g: TestFunction, u: Union[PointPairInvariant, float], m: int = 0,
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> float:
    if m not in (0, 1):
        raise UnsupportedError(f"even kernels are available for m in (0, 1), got {m!r}")
    uu = _as_u(u)
    if uu >= g.u_support:
        return 0.0
    span = math.sqrt(g.u_support - uu)
    val = quad_finite(lambda s: float(g.composed(uu + s * s, m + 1)[0]), 0.0, span, spec)
    return -0.5 * val / (-4.0 * math.pi) ** m


def kernel_f_even(
    g: TestFunction, u: Union[PointPairInvariant, float], spec: QuadratureSpec = DEFAULT_SPEC
) -> float:
    """f_e(u), the n = 2 kernel."""
    return kernel_even(g, u, 0, spec)


def kernel_values(dim: Dimension, g: TestFunction, us) -> np.ndarray:
    if dim.is_even:
        return even_kernel_values(g, us, dim.m)
    return odd_kernel_values(g, us, dim.m)


# ---------- spectral side ----------

def cosine_transform_nodes(g: Evaluator, ts, support: float, panels: Optional[int] = None):
    """2 * int_0^a g(x) cos(t x) dx for every t, by composite Gauss-Legendre."""
    ts = np.asarray(ts, dtype=float)
    flat = np.abs(np.atleast_1d(ts)).ravel()
    if panels is None:
        tmax = float(flat.max()) if flat.size else 0.0
        panels = max(40, int(math.ceil(tmax * support / 3.0)))
    x, w = gauss_legendre_panels(0.0, support, panels, _GL_ORDER)
    gw = 2.0 * np.asarray(g(x), dtype=float) * w
    out = np.empty_like(flat)
    for i in range(0, flat.size, _ROW_CHUNK):
        block = flat[i:i + _ROW_CHUNK]
        out[i:i + _ROW_CHUNK] = np.cos(np.outer(block, x)) @ gw
    return out.reshape(np.shape(ts)) if np.ndim(ts) else float(out[0])


def diagonal_density(dim: Dimension, t) -> np.ndarray:
    """Weight of h on the diagonal; integrating h against it over R gives k_n(x, x)."""
    t = np.asarray(t, dtype=float)
    m = dim.m
    if dim.is_even:
        pref = 1.0 / ((4.0 * math.pi) ** (m + 1) * math.factorial(m))
        return pref * np.tanh(math.pi * t) * t * conjugate_pochhammer(0.5, t, m)
    pref = 1.0 / ((2.0 * math.pi) ** (m + 1) * odd_double_factorial(m))
    return pref * conjugate_pochhammer(0.0, t, m)


@dataclass(frozen=True)
class SpectralGrid:
    nodes: np.ndarray
    weights: np.ndarray
    h_values: np.ndarray

    @property
    def cutoff(self) -> float:
        return float(self.nodes[-1]) if self.nodes.size else 0.0


def _window(lo: float, hi: float, support: float) -> Tuple[np.ndarray, np.ndarray]:
    width = 2.0 / max(1.0, support)
    panels = max(1, int(math.ceil((hi - lo) / width)))
    return gauss_legendre_panels(lo, hi, panels, _GL_ORDER)


def spectral_grid(
    h: Evaluator,
    weight: Evaluator,
    support: float,
    spec: QuadratureSpec = DEFAULT_SPEC,
    start: float = 0.0,
) -> SpectralGrid:
    """
    Gauss-Legendre nodes on [start, T] for integrals of h * weight. The first window
    ends at max(40/a, 60); windows then double while sampled |h * weight| exceeds
    abs_tol/10 and h is still above its rounding floor.
    """
    T0 = max(40.0 / support, 60.0)
    x, w = _window(start, max(T0, start + 1.0), support)
    hv = np.asarray(h(x), dtype=float)
    parts = [(x, w, hv)]
    floor = 1e-15 * float(np.max(np.abs(hv))) if hv.size else 0.0
    lo, span = max(T0, start + 1.0), T0
    for _ in range(_MAX_DOUBLINGS):
        x, w = _window(lo, lo + span, support)
        hv = np.asarray(h(x), dtype=float)
        parts.append((x, w, hv))
        peak = float(np.max(np.abs(hv * weight(x))))
        if peak < spec.abs_tol / 10.0 or float(np.max(np.abs(hv))) <= floor:
            log.debug("spectral cutoff at t=%g (peak %.3e)", lo + span, peak)
            return SpectralGrid(*(np.concatenate(p) for p in zip(*parts)))
        lo += span
        span *= 2.0
    raise ConvergenceError(
        f"spectral integral did not decay by t={lo:g}; last sampled |h*w| was {peak:.3e}"
    )


def diagonal_value(
    dim: Union[Dimension, int], h: Evaluator, support: float,
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> float:
    """k_n(x, x) from the even spectral function h; the integral over R is twice [0, T]."""
    density = _density_for(dim.n if isinstance(dim, Dimension) else int(dim))
    grid = spectral_grid(h, density, support, spec)
    return 2.0 * float(np.sum(grid.h_values * density(grid.nodes) * grid.weights))


def shifted_to_unshifted(h: Evaluator, dim: Dimension) -> Evaluator:
    shift = dim.onset ** 2

    def h_tilde(t):
        t = np.asarray(t, dtype=float)
        return h(np.sqrt(t * t + shift))

    return h_tilde


def counting_pairing(
    dim: Dimension, h: Evaluator, support: float, spec: QuadratureSpec = DEFAULT_SPEC
) -> float:
    """int F'_n(tau) h(tau) dtau over [(n-1)/2, inf)."""
    on = dim.onset

    def integrand(tau: float) -> float:
        return float(f_prime(dim, tau) * np.asarray(h(np.array([tau])))[0])

    head = quad_finite(integrand, on, on + 1.0, spec)
    grid = spectral_grid(h, lambda t: f_prime(dim, t), support, spec, start=on + 1.0)
    return head + float(np.sum(grid.h_values * f_prime(dim, grid.nodes) * grid.weights))


# ---------- spherical functions and the transform pair ----------

def spherical_function(n: int, t: float, rho: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """2F1((n-1)/2 + it, (n-1)/2 - it; n/2; -sinh^2(rho/2))."""
    if int(n) != n or n < 1:
        raise DomainError(f"spherical functions need an integer n >= 1, got {n!r}")
    a = (n - 1) / 2.0
    z = -math.sinh(rho / 2.0) ** 2
    return hyp2f1_neg_axis(ComplexValue(a, t), ComplexValue(a, -t), n / 2.0, z, spec)


def _radial_series(n: int, lam: np.ndarray, rho: float) -> Tuple[np.ndarray, np.ndarray]:
    a = -lam / (2.0 * n)
    b = lam * (lam + 2.0 * (n - 1) / 3.0) / (8.0 * n * (n + 2))
    return 1 + a * rho ** 2 + b * rho ** 4, 2 * a * rho + 4 * b * rho ** 3


def _radial_ode_table(n: int, ts: np.ndarray, rhos: np.ndarray, spec: QuadratureSpec) -> np.ndarray:
    # phi'' + (n-1) coth(rho) phi' + (t^2 + (n-1)^2/4) phi = 0, phi(0) = 1
    lam = ts * ts + ((n - 1) / 2.0) ** 2
    rho0 = min(1e-4, 0.1 / math.sqrt(float(lam.max())))
    out = np.empty((ts.size, rhos.size))
    near = rhos <= rho0
    for j in np.flatnonzero(near):
        out[:, j] = _radial_series(n, lam, float(rhos[j]))[0]
    far = np.flatnonzero(~near)
    if far.size == 0:
        return out
    phi0, dphi0 = _radial_series(n, lam, rho0)
    N = ts.size

    def rhs(r, y):
        return np.concatenate([y[N:], -(n - 1) / math.tanh(r) * y[N:] - lam * y[:N]])

    sol = integrate.solve_ivp(
        rhs, (rho0, float(rhos[far].max())), np.concatenate([phi0, dphi0]),
        method="DOP853", t_eval=rhos[far], rtol=max(spec.rel_tol, 1e-12), atol=spec.abs_tol,
    )
    if not sol.success:
        raise ConvergenceError(f"radial equation for n={n} failed: {sol.message}")
    out[:, far] = sol.y[:N]
    return out


def spherical_function_table(
    n: int, ts, rhos, spec: QuadratureSpec = DEFAULT_SPEC
) -> np.ndarray:
    """phi_t(rho) on the grid ts x rhos; rows follow ts, columns follow rhos."""
    if int(n) != n or n < 1:
        raise DomainError(f"spherical functions need an integer n >= 1, got {n!r}")
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    rhos = np.atleast_1d(np.asarray(rhos, dtype=float))
    if np.any(rhos < 0):
        raise DomainError("spherical functions need rho >= 0")
    if n == 1:
        return np.cos(np.outer(ts, rhos))
    if n == 3:
        tr = np.outer(ts, rhos)
        sh = np.sinh(rhos)
        with np.errstate(invalid="ignore", divide="ignore"):
            ratio = np.where(rhos > 0, rhos / np.where(rhos > 0, sh, 1.0), 1.0)
        return np.sinc(tr / math.pi) * ratio[None, :]
    order = np.argsort(rhos)
    table = _radial_ode_table(n, ts, rhos[order], spec)
    out = np.empty_like(table)
    out[:, order] = table
    return out


def sphere_area_prefactor(n: int) -> float:
    return n * euclidean_ball_volume(n) * 2.0 ** (n - 1)


def spherical_transform(
    n: int,
    kernel: Evaluator,
    ts,
    support: float,
    spec: QuadratureSpec = DEFAULT_SPEC,
    panels: Optional[int] = None,
) -> np.ndarray:
    """
    h(t) = n omega_n 2^{n-1} int_0^inf k(u) phi_t(u) (u^2+u)^{(n-2)/2} du, evaluated in rho
    on [0, support] where (u^2+u)^{(n-2)/2} du = (sinh(rho)/2)^{n-1} drho.
    """
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    if panels is None:
        panels = max(40, int(math.ceil(float(np.abs(ts).max()) * support / 3.0)))
    rho, w = gauss_legendre_panels(0.0, support, panels, _GL_ORDER)
    us = np.sinh(rho / 2.0) ** 2
    jac = (np.sinh(rho) / 2.0) ** (n - 1)
    kw = np.asarray(kernel(us), dtype=float) * jac * w
    phi = spherical_function_table(n, ts, rho, spec)
    return sphere_area_prefactor(n) * (phi @ kw)


def inverse_transform(
    n: int, grid: SpectralGrid, us: Sequence[float], spec: QuadratureSpec = DEFAULT_SPEC
) -> np.ndarray:
    """k(u) = int_R h(t) phi_t(u) w_n(t) dt on a precomputed spectral grid."""
    dim_density = _density_for(n)
    rhos = 2.0 * np.arcsinh(np.sqrt(np.asarray(us, dtype=float)))
    phi = spherical_function_table(n, grid.nodes, rhos, spec)
    coef = grid.h_values * dim_density(grid.nodes) * grid.weights
    return 2.0 * (coef @ phi)


def _density_for(n: int) -> Evaluator:
    if n == 1:
        return lambda t: np.full_like(np.asarray(t, dtype=float), 1.0 / (2.0 * math.pi))
    dim = Dimension(n)
    return lambda t: diagonal_density(dim, t)


F_KINDS = ("even_case", "odd_case")


def mehler_fock_roundtrip(
    m: int,
    f_kind: str,
    g: TestFunction,
    u_samples: Sequence[float],
    spec: QuadratureSpec = ROUNDTRIP_SPEC,
    on_progress: Optional[Callable[[Dict], None]] = None,
) -> float:
    """
    Build the kernel of g in dimension 2m+2 (even_case) or 2m+1 (odd_case), push it
    through the forward transform, invert, and return the largest error at u_samples.
    """
    if f_kind not in F_KINDS:
        raise ValidationError(f"f_kind expected one of {F_KINDS}, got {f_kind!r}")
    _check_m(m)
    if f_kind == "even_case" and m > 1:
        raise UnsupportedError(f"even kernels are available for m in (0, 1), got {m}")
    us = np.asarray(u_samples, dtype=float)
    if us.size == 0 or np.any(us < 0) or np.any(us > 4):
        raise ValidationError("u_samples must be a non-empty list within [0, 4]")
    n = 2 * m + 2 if f_kind == "even_case" else 2 * m + 1
    prog = Progress(on_progress)

    def kernel(u):
        if f_kind == "even_case":
            return even_kernel_values(g, u, m)
        return odd_kernel_values(g, u, m)

    density = _density_for(n)
    guide = spectral_grid(g.transform, density, g.support, spec)
    prog.emit("roundtrip", 10, stage="grid", cutoff=guide.cutoff, nodes=int(guide.nodes.size))
    h_fwd = spherical_transform(n, kernel, guide.nodes, g.support, spec)
    prog.emit("roundtrip", 60, stage="forward")
    grid = SpectralGrid(guide.nodes, guide.weights, h_fwd)
    rebuilt = inverse_transform(n, grid, us, spec)
    prog.emit("roundtrip", 100, stage="inverse")
    err = float(np.max(np.abs(rebuilt - kernel(us))))
    log.debug("roundtrip n=%d %s: cutoff %g, max error %.3e", n, g.label, guide.cutoff, err)
    return err
