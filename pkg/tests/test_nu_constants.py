import math

import mpmath
import pytest

from weylbound.errors import UnsupportedError
from weylbound.nu_constants import (
    M_MAX,
    characteristic_determinant,
    first_root,
    half_roots,
    nu,
    nu_cached,
    nu_table,
)


def test_nu_low_orders():
    assert nu(1).value == pytest.approx(math.pi, abs=1e-9)
    assert nu(3).value == pytest.approx(2.0 * math.pi, abs=1e-9)
    assert nu(4).value == pytest.approx(7.81870734, abs=1e-7)


def test_nu2_is_first_root_of_clamped_beam_equation():
    ref = float(mpmath.findroot(lambda x: mpmath.cos(x) * mpmath.cosh(x) - 1, 4.7))
    assert nu(2).value == pytest.approx(ref, abs=1e-9)
    assert float(nu(2)) == pytest.approx(4.73004074, abs=1e-8)


def test_nu_is_increasing_in_m():
    values = [c.value for c in nu_table()]
    assert len(values) == M_MAX
    assert all(a < b for a, b in zip(values, values[1:]))


def test_nu_cached_is_stable():
    a = nu_cached(2)
    b = nu_cached(2)
    assert a == b
    assert [c.m for c in nu_table((2, 3))] == [2, 3]


def test_determinant_vanishes_at_root():
    v = nu(2).value
    # the first clamped mode is symmetric
    near = characteristic_determinant(2, v, "even")
    far = max(abs(characteristic_determinant(2, v - 0.05, "even")),
              abs(characteristic_determinant(2, v + 0.05, "even")))
    assert abs(near) < 1e-6 * far
    assert first_root(2, "even") == pytest.approx(v, abs=1e-9)


def test_half_roots_pick_one_of_each_pair():
    for m in range(1, M_MAX + 1):
        roots = half_roots(m)
        assert len(roots) == m
        for w in roots:
            assert abs(w ** (2 * m) - (-1) ** m) < 1e-9


@pytest.mark.parametrize("m", [0, M_MAX + 1, 2.5])
def test_nu_rejects_unsupported_orders(m):
    with pytest.raises(UnsupportedError):
        nu(m)


def test_unknown_parity():
    with pytest.raises(UnsupportedError):
        characteristic_determinant(2, 4.0, "both")
