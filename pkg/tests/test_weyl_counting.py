import math

import numpy as np
import pytest

from weylbound.errors import DomainError, UnsupportedError, ValidationError
from weylbound.geometry import BoundPair, Dimension, LocalGeometry
from weylbound.nu_constants import nu_cached
from weylbound.specfun import quad_finite
from weylbound.weyl_counting import (
    asymptotic_polynomial,
    counting_table,
    f_prime,
    g_function,
    g_norm,
    g_norm_oracle,
    global_counting_bounds,
    local_counting_bounds,
    local_counting_bounds_lowdim,
    local_counting_lower,
    local_counting_upper,
    weyl_constant,
)


def test_density_closed_forms():
    # n = 3: tau sqrt(tau^2 - 1) / (2 pi^2); n = 2: tau tanh(pi sqrt(tau^2 - 1/4)) / (2 pi)
    assert f_prime(Dimension(3), 2.0) == pytest.approx(2.0 * math.sqrt(3.0) / (2 * math.pi ** 2))
    s = math.sqrt(4.0 - 0.25)
    assert f_prime(Dimension(2), 2.0) == pytest.approx(2.0 * math.tanh(math.pi * s) / (2 * math.pi))
    assert f_prime(Dimension(3), 0.5) == 0.0
    assert f_prime(Dimension(4), 1.5) == 0.0
    arr = f_prime(Dimension(5), np.array([0.5, 3.0, 10.0]))
    assert arr.shape == (3,) and arr[0] == 0.0 and arr[2] > arr[1] > 0.0


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6, 7])
def test_asymptotic_polynomial_tracks_density(n):
    dim = Dimension(n)
    dp = asymptotic_polynomial(dim).derivative()
    for tau in (30.0, 80.0):
        assert dp(tau) == pytest.approx(f_prime(dim, tau), rel=1e-6)
    assert dp(dim.onset - 0.1) == 0.0


def test_asymptotic_polynomial_surface_case():
    p = asymptotic_polynomial(Dimension(2))
    assert p(3.0) == pytest.approx(9.0 / (4 * math.pi))
    with pytest.raises(UnsupportedError):
        asymptotic_polynomial(Dimension(10))


@pytest.mark.parametrize(
    "n,exact",
    [
        (2, 1.0 / (48 * math.pi)),
        (3, 1.0 / (12 * math.pi ** 2)),
        (4, 17.0 / (7680 * math.pi ** 2)),
    ],
)
def test_g_norm_exact_values_agree_with_quadrature(n, exact):
    dim = Dimension(n)
    assert g_norm(dim) == pytest.approx(exact, rel=1e-14)
    assert g_norm_oracle(dim) == pytest.approx(exact, rel=1e-6)


@pytest.mark.parametrize("n", [5, 6, 7])
def test_g_norm_table_dominates_quadrature(n):
    dim = Dimension(n)
    assert g_norm(dim) > 0.0
    assert g_norm_oracle(dim) <= g_norm(dim) * (1 + 1e-6)


def test_g_function_is_continuous_from_onset():
    dim = Dimension(3)
    assert g_function(dim, 0.5) == 0.0
    assert abs(g_function(dim, 1.0 + 1e-9)) < 1e-6
    # G_3 decreases monotonically to -1/(12 pi^2)
    taus = (1.5, 3.0, 6.0, 40.0)
    vals = [g_function(dim, t) for t in taus]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    for t, v in zip(taus, vals):
        exact = ((t * t - 1) ** 1.5 / 3 - t ** 3 / 3 + t / 2 - 1.0 / 6) / (2 * math.pi ** 2)
        assert v == pytest.approx(exact, rel=1e-7, abs=1e-12)
    # both sides of the series split agree
    assert g_function(dim, 2.0 - 1e-9) == pytest.approx(g_function(dim, 2.0 + 1e-9), abs=1e-8)


def _hyperbolic_counting(dim, tau):
    return quad_finite(lambda t: f_prime(dim, t), dim.onset, tau)


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("tau", [3.0, 10.0])
def test_bounds_enclose_hyperbolic_space_counting(n, tau):
    # on H^n itself d is unbounded; a huge d leaves only the Tauberian main terms
    dim = Dimension(n)
    pair = local_counting_bounds(dim, LocalGeometry(1e8), tau)
    assert pair.contains(_hyperbolic_counting(dim, tau))


def test_upper_bound_closed_form_surface():
    v = nu_cached(2)
    expected = (1 / (4 * math.pi)) * (2.0 / 1.0) * ((2 / math.pi) * v * v + v) * v
    assert local_counting_upper(Dimension(2), LocalGeometry(1.0), 0.0) == pytest.approx(expected)


def test_lower_bound_trivial_at_zero():
    for n in range(2, 8):
        assert local_counting_lower(Dimension(n), LocalGeometry(1.0), 0.0) <= 0.0


def test_refined_surface_bounds_direct_substitution():
    v, pi = nu_cached(2), math.pi
    pair = local_counting_bounds_lowdim(2, LocalGeometry(1.0), 10.0)
    assert pair.upper == pytest.approx((100 + (4 * v * v + 2 * v * pi) / pi * (10 + v)) / (4 * pi))
    assert pair.lower == pytest.approx((100 - 4 * v * v / pi * (10 + v) - 1 / 12) / (4 * pi))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_refined_bounds_are_ordered(n):
    for tau in (0.0, 1.0, 5.0, 50.0):
        pair = local_counting_bounds_lowdim(n, LocalGeometry(0.7), tau)
        assert pair.lower <= pair.upper
    assert local_counting_bounds_lowdim(n, LocalGeometry(0.7), 0.0, clamp=True).lower >= 0.0


def test_refined_bounds_only_low_dimensions():
    with pytest.raises(UnsupportedError):
        local_counting_bounds_lowdim(5, LocalGeometry(1.0), 2.0)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_weyl_asymptotics(n):
    dim, geom, tau = Dimension(n), LocalGeometry(1.0), 1e4
    c = weyl_constant(dim)
    v = nu_cached((n + 2) // 2)
    # both remainders are O(n (2 nu^2/pi + nu + n) / (d tau)) relative to the leading term
    tol = 2.0 * n * (2.0 * v * v / math.pi + v + n) / (geom.d * tau)
    pair = local_counting_bounds(dim, geom, tau)
    lo, up = pair.lower / (c * tau ** n), pair.upper / (c * tau ** n)
    assert 1.0 - tol <= lo <= 1.0 <= up <= 1.0 + tol
    far = local_counting_bounds(dim, geom, 10.0 * tau)
    assert far.width / (10.0 * tau) ** n < pair.width / tau ** n


def test_bounds_tighten_with_radius():
    dim = Dimension(3)
    narrow = local_counting_bounds(dim, LocalGeometry(0.5), 20.0)
    wide = local_counting_bounds(dim, LocalGeometry(5.0), 20.0)
    assert wide.width < narrow.width


def test_global_bounds_scale_by_volume():
    dim = Dimension(3)
    local = local_counting_bounds(dim, LocalGeometry(0.8), 12.0)
    glob = global_counting_bounds(dim, 3.5, 0.8, 12.0)
    assert glob.upper == pytest.approx(3.5 * local.upper)
    assert glob.lower == pytest.approx(3.5 * local.lower)
    with pytest.raises(ValidationError):
        global_counting_bounds(dim, 0.0, 0.8, 12.0)


def test_counting_table_reports_progress(progress_printer):
    taus = [0.0, 2.0, 4.0, 8.0]
    rows = counting_table(Dimension(2), LocalGeometry(1.0), taus, clamp=True,
                          on_progress=progress_printer)
    assert [r[0] for r in rows] == taus
    assert all(lo <= up and lo >= 0.0 for _, lo, up in rows)
    phases = {e["phase"] for e in progress_printer.events}
    assert phases == {"count"}
    assert progress_printer.events[-1]["pct"] == 100

    refined = counting_table(Dimension(2), LocalGeometry(1.0), taus, refined=True)
    assert refined[2][2] == pytest.approx(local_counting_bounds_lowdim(2, LocalGeometry(1.0), 4.0).upper)


def test_geometry_validation():
    with pytest.raises(DomainError):
        Dimension(1)
    with pytest.raises(DomainError):
        LocalGeometry(0.0)
    with pytest.raises(ValidationError):
        BoundPair(2.0, 1.0)
    assert BoundPair(-1.0, 2.0).clamped() == BoundPair(0.0, 2.0)
