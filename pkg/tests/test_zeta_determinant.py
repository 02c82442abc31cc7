import math
import os
from pathlib import Path

import pytest
from scipy import special

from weylbound.errors import DomainError, ValidationError, WindowError
from weylbound.geometry import Dimension, HyperbolicSurface
from weylbound.spectrum import Spectrum, parse_eigenvalue_file
from weylbound.weyl_counting import global_counting_bounds
from weylbound.zeta_determinant import (
    DetQuery,
    count_consistency,
    det_bounds,
    l1_head,
    l1_tail_bound,
    l2_term,
    l3_bound,
    sweep_det_bounds,
)

BOLZA = HyperbolicSurface.bolza()
BOLZA_DET = 4.72273280444557
EPS, T = 0.3524, 2.2165

# A longer Bolza list (complete past lambda^2 = 50) can be supplied for the c = 50 check.
_FULL_FILE = os.environ.get("WEYLBOUND_BOLZA_FILE", "")


@pytest.fixture
def bolza(bolza_file):
    return parse_eigenvalue_file(bolza_file).parsed


def test_l1_head_single_eigenvalue():
    spec = Spectrum((0.0, 1.0))
    assert l1_head(spec, 2.0, 1.0) == pytest.approx(0.21938393439552, rel=1e-12)
    assert l1_head(Spectrum((0.0,)), 5.0, 1.0) == 0.0
    with pytest.raises(DomainError):
        l1_head(spec, 2.0, 0.0)


def test_l1_tail_bound_behaviour():
    b20 = l1_tail_bound(BOLZA, 20.0, EPS)
    assert b20 == pytest.approx(0.01495, rel=5e-2)
    assert l1_tail_bound(BOLZA, 30.0, EPS) < b20 < l1_tail_bound(BOLZA, 15.0, EPS)
    assert l1_tail_bound(BOLZA, 400.0, EPS) < 1e-20
    genus3 = HyperbolicSurface(genus=3, systole=BOLZA.systole)
    assert l1_tail_bound(genus3, 20.0, EPS) == pytest.approx(2.0 * b20)


def test_l2_term_against_scipy_quad():
    from scipy import integrate

    area, eps = BOLZA.area, EPS
    gamma = 0.5772156649015329

    def f(r):
        s = r * r + 0.25
        return (1.0 / math.cosh(math.pi * r) ** 2) * (
            (1.0 - special.expn(2, eps * s)) / eps + s * (gamma - 1.0 + math.log(eps * s))
        )

    integral = integrate.quad(f, 0.0, 20.0, epsabs=1e-13, epsrel=1e-12)[0]
    expected = (-area / (4 * math.pi * eps) - (area / (12 * math.pi) + 1.0) * (gamma + math.log(eps))
                + area / 4.0 * integral)
    assert l2_term(BOLZA, eps) == pytest.approx(expected, rel=1e-8)


def test_l3_bound_behaviour():
    assert l3_bound(BOLZA, EPS, T) == pytest.approx(0.03152, rel=5e-2)
    assert l3_bound(BOLZA, 0.2, T) < l3_bound(BOLZA, 0.3, T) < l3_bound(BOLZA, EPS, T)
    assert l3_bound(BOLZA, 1e-3, 1.0) < 1e-100
    with pytest.raises(WindowError):
        l3_bound(BOLZA, EPS, 2.3)


def test_bolza_determinant_bracket(bolza):
    res = det_bounds(DetQuery(BOLZA, bolza, 20.0, EPS, T))
    assert res.det.lower <= res.det.upper
    assert res.contains(BOLZA_DET)
    assert res.det.lower == pytest.approx(4.51591, abs=2e-2)
    assert res.det.upper == pytest.approx(4.88303, abs=2e-2)
    assert math.exp(-(res.l1_head + res.l2)) == pytest.approx(4.73115, abs=5e-3)
    assert res.l1_tail == pytest.approx(0.01495, rel=5e-2)
    assert res.l3 == pytest.approx(0.03152, rel=5e-2)
    # det = exp(-(-log det)): the endpoints swap
    assert res.det.upper == pytest.approx(math.exp(-res.neg_log_det.lower))
    d = res.as_dict()
    assert d["c"] == 20.0 and d["det_lower"] == res.det.lower


def test_more_eigenvalues_narrow_the_bracket(bolza):
    widths = [det_bounds(DetQuery(BOLZA, bolza, c, EPS, T)).neg_log_det.width
              for c in (15.0, 20.0, 30.0)]
    assert widths[0] > widths[1] > widths[2]


def test_query_validation(bolza):
    with pytest.raises(ValidationError):
        DetQuery(BOLZA, bolza, 50.0, EPS, T)
    with pytest.raises(WindowError):
        DetQuery(BOLZA, bolza, 20.0, 0.5, 0.4)
    with pytest.raises(DomainError):
        DetQuery(BOLZA, bolza, 0.0, EPS, T)


def test_count_consistency_warns_on_implausible_list(caplog):
    # far more eigenvalues below 20 than the upper counting bound allows
    spec = Spectrum.from_values([0.0] + [1.0] * 150)
    pair = count_consistency(BOLZA, spec, 20.0)
    assert pair.upper < 150
    assert "outside the counting bracket" in caplog.text


def test_count_consistency_bolza(bolza, caplog):
    pair = count_consistency(BOLZA, bolza, 20.0)
    assert pair.upper >= bolza.count_upto(20.0)
    assert "outside the counting bracket" not in caplog.text


def test_sweep_marks_the_narrowest_point(bolza, progress_printer):
    rows = sweep_det_bounds(BOLZA, bolza, 20.0, [0.25, EPS, 2.5], [1.5, T],
                            on_progress=progress_printer)
    # eps = 2.5 is outside the window for every T and is skipped
    assert len(rows) == 4
    best = [r for r in rows if r["best"] == 1]
    assert len(best) == 1
    assert best[0]["det_upper"] - best[0]["det_lower"] == min(
        r["det_upper"] - r["det_lower"] for r in rows
    )
    assert all(r["det_lower"] <= BOLZA_DET <= r["det_upper"] for r in rows)
    assert progress_printer.events[-1]["pct"] == 100
    with pytest.raises(ValidationError):
        sweep_det_bounds(BOLZA, bolza, 20.0, [3.0], [3.0])


@pytest.mark.parametrize("c", [10.0, 20.0, 30.0])
def test_bolza_determinant_bracket_up_to_known_horizon(bolza, c):
    res = det_bounds(DetQuery(BOLZA, bolza, c, EPS, T))
    assert res.contains(BOLZA_DET)
    assert 0.0 <= res.det.lower <= res.det.upper
    assert res.neg_log_det.contains(-math.log(BOLZA_DET))


@pytest.mark.parametrize("c", [10.0, 20.0, 30.0])
def test_bolza_counts_inside_global_brackets(bolza, c):
    count = bolza.count_upto(c)
    generic = global_counting_bounds(Dimension(2), BOLZA.area, BOLZA.systole, math.sqrt(c),
                                     clamp=True)
    assert generic.lower >= 0.0
    assert generic.contains(count)
    assert count_consistency(BOLZA, bolza, c).contains(count)


@pytest.mark.skipif(not _FULL_FILE, reason="WEYLBOUND_BOLZA_FILE not set")
def test_bolza_determinant_c50():
    spec = parse_eigenvalue_file(Path(_FULL_FILE), closed=True).parsed
    res = det_bounds(DetQuery(BOLZA, spec, 50.0, 0.22161, T))
    got = sorted((res.det.lower, res.det.upper))
    assert got[0] == pytest.approx(4.71927, abs=5e-3)
    assert got[1] == pytest.approx(4.7253, abs=5e-3)
    assert res.contains(BOLZA_DET)
