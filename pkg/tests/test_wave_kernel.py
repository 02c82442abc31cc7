import math

import numpy as np
import pytest

from weylbound.errors import ConvergenceError, DomainError, UnsupportedError, ValidationError
from weylbound.geometry import Dimension
from weylbound.wave_kernel import (
    PointPairInvariant,
    bump,
    counting_pairing,
    diagonal_density,
    diagonal_value,
    even_kernel_values,
    kernel_even,
    kernel_odd,
    kernel_values,
    mehler_fock_roundtrip,
    odd_kernel_values,
    shifted_to_unshifted,
    spectral_grid,
    spherical_function,
    spherical_function_table,
    spherical_transform,
)


def test_point_pair_invariant():
    p = PointPairInvariant.from_rho(1.2)
    assert p.rho == pytest.approx(1.2, rel=1e-14)
    assert PointPairInvariant(0.0).rho == 0.0
    with pytest.raises(DomainError):
        PointPairInvariant(-0.1)


def test_bump_profile_and_derivatives():
    g = bump(1.0, 1.0)
    assert float(g.g(0.0)) == pytest.approx(math.exp(-1.0))
    assert float(g.g(1.0)) == 0.0 and float(g.g(1.5)) == 0.0
    # G'(s) against a central difference
    s, h = 0.3, 1e-6
    num = (float(g.profile(s + h)) - float(g.profile(s - h))) / (2 * h)
    assert float(g.profile_d1(s)) == pytest.approx(num, rel=1e-7)
    num2 = (float(g.profile_d1(s + h)) - float(g.profile_d1(s - h))) / (2 * h)
    assert float(g.profile_d2(s)) == pytest.approx(num2, rel=1e-6)
    assert g.u_support == pytest.approx(math.sinh(0.5) ** 2)
    with pytest.raises(ValidationError):
        bump(0.0, 1.0)
    with pytest.raises(UnsupportedError):
        g.composed(0.1, 3)


def test_composed_derivatives_are_smooth_across_series_switch():
    g = bump(1.5, 1.0)
    for order in (0, 1, 2):
        lo = float(g.composed(np.array([1e-4 * (1 - 1e-9)]), order)[0])
        hi = float(g.composed(np.array([1e-4 * (1 + 1e-9)]), order)[0])
        assert lo == pytest.approx(hi, rel=1e-8)


def test_odd_kernels_at_the_diagonal():
    g = bump(1.0, 1.0)
    # k_1(0) = g(0); k_3(0) = -g''(0)/(2 pi) = -G'(0)/pi
    assert kernel_odd(g, 0.0, 0) == pytest.approx(math.exp(-1.0))
    assert kernel_odd(g, PointPairInvariant(0.0), 1) == pytest.approx(math.exp(-1.0) / math.pi)
    assert kernel_odd(g, g.u_support + 0.1, 2) == 0.0
    with pytest.raises(UnsupportedError):
        kernel_odd(g, 0.0, 3)


@pytest.mark.parametrize("m", [0, 1])
def test_even_kernel_quadrature_paths_agree(m):
    g = bump(1.5, 1.0)
    us = np.array([0.0, 0.2, 0.6])
    vec = even_kernel_values(g, us, m)
    for u, v in zip(us, vec):
        assert kernel_even(g, float(u), m) == pytest.approx(float(v), rel=1e-8, abs=1e-12)
    assert kernel_even(g, g.u_support + 0.01, m) == 0.0
    assert float(even_kernel_values(g, [g.u_support + 0.01], m)[0]) == 0.0
    with pytest.raises(UnsupportedError):
        kernel_even(g, 0.1, 2)


def test_kernel_values_dispatch_on_parity():
    g = bump(1.0, 1.0)
    us = np.array([0.0, 0.1])
    assert np.allclose(kernel_values(Dimension(3), g, us), odd_kernel_values(g, us, 1))
    assert np.allclose(kernel_values(Dimension(4), g, us), even_kernel_values(g, us, 1))


def test_diagonal_densities():
    t = np.array([0.5, 2.0])
    assert np.allclose(diagonal_density(Dimension(3), t), t * t / (4 * math.pi ** 2))
    assert np.allclose(diagonal_density(Dimension(2), t), t * np.tanh(math.pi * t) / (4 * math.pi))


@pytest.mark.parametrize(
    "n,a,rel",
    [(1, 1.0, 1e-7), (2, 1.0, 1e-6), (3, 1.0, 1e-6), (4, 2.0, 1e-4), (5, 2.0, 1e-4)],
)
def test_kernel_diagonal_matches_spectral_side(n, a, rel):
    g = bump(a, 1.0)
    m = (n - 1) // 2
    direct = kernel_odd(g, 0.0, m) if n % 2 else kernel_even(g, 0.0, m)
    assert diagonal_value(n, g.transform, g.support) == pytest.approx(direct, rel=rel)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_counting_pairing_equals_shifted_diagonal(n):
    dim, g = Dimension(n), bump(2.0, 1.0)
    shifted = diagonal_value(dim, shifted_to_unshifted(g.transform, dim), g.support)
    assert counting_pairing(dim, g.transform, g.support) == pytest.approx(shifted, rel=1e-6)


def test_spectral_grid_needs_decay():
    with pytest.raises(ConvergenceError):
        spectral_grid(np.ones_like, np.ones_like, 1.0)


@pytest.mark.parametrize("rho", [0.3, 2.5, 5.0])
@pytest.mark.parametrize("t", [0.0, 1.7, 6.0])
def test_spherical_function_three_dimensional_closed_form(rho, t):
    expected = rho / math.sinh(rho) if t == 0 else math.sin(t * rho) / (t * math.sinh(rho))
    assert spherical_function(3, t, rho) == pytest.approx(expected, rel=1e-7, abs=1e-12)
    table = spherical_function_table(3, [t], [rho])
    assert float(table[0, 0]) == pytest.approx(expected, rel=1e-12, abs=1e-15)


@pytest.mark.parametrize("rho", [0.3, 1.0, 2.5])
def test_spherical_function_large_spectral_parameter(rho):
    t = 30.0
    expected = math.sin(t * rho) / (t * math.sinh(rho))
    assert spherical_function(3, t, rho) == pytest.approx(expected, rel=1e-7, abs=1e-10)
    for n in (2, 4):
        table = spherical_function_table(n, [t], [rho])
        assert spherical_function(n, t, rho) == pytest.approx(float(table[0, 0]), rel=1e-6,
                                                             abs=1e-7)


@pytest.mark.parametrize("n", [2, 4, 5])
def test_radial_ode_matches_hypergeometric(n):
    ts = [0.0, 1.3, 4.0]
    rhos = [1.5, 0.0, 0.4]  # unsorted on purpose
    table = spherical_function_table(n, ts, rhos)
    assert table.shape == (3, 3)
    for i, t in enumerate(ts):
        for j, rho in enumerate(rhos):
            assert float(table[i, j]) == pytest.approx(spherical_function(n, t, rho), rel=1e-6,
                                                       abs=1e-9)


def test_spherical_function_rejects_bad_input():
    with pytest.raises(DomainError):
        spherical_function(0, 1.0, 0.5)
    with pytest.raises(DomainError):
        spherical_function_table(3, [1.0], [-0.5])


@pytest.mark.parametrize("n", [1, 3])
def test_forward_transform_recovers_cosine_transform(n):
    g = bump(1.0, 1.0)
    m = (n - 1) // 2
    ts = np.array([0.0, 0.5, 2.0, 5.0])
    h = spherical_transform(n, lambda u: odd_kernel_values(g, u, m), ts, g.support)
    assert np.allclose(h, g.transform(ts), rtol=1e-8, atol=1e-10)


def test_roundtrip_odd_case(progress_printer):
    err = mehler_fock_roundtrip(1, "odd_case", bump(1.5, 1.0), [0.0, 0.25, 0.5],
                                on_progress=progress_printer)
    assert err < 1e-4
    events = [e for e in progress_printer.events if e["phase"] == "roundtrip"]
    assert [e["pct"] for e in events] == [10, 60, 100]
    assert events[0]["nodes"] > 0 and events[0]["cutoff"] >= 60.0


def test_roundtrip_even_case():
    err = mehler_fock_roundtrip(0, "even_case", bump(2.0, 1.0), [0.0, 0.5])
    assert err < 1e-4


def test_roundtrip_validation():
    g = bump(1.0, 1.0)
    with pytest.raises(ValidationError):
        mehler_fock_roundtrip(0, "both", g, [0.0])
    with pytest.raises(UnsupportedError):
        mehler_fock_roundtrip(2, "even_case", g, [0.0])
    with pytest.raises(ValidationError):
        mehler_fock_roundtrip(0, "odd_case", g, [5.0])
    with pytest.raises(ValidationError):
        mehler_fock_roundtrip(0, "odd_case", g, [])
