import math

import pytest

from weylbound.errors import SpectrumFileError, ValidationError
from weylbound.spectrum import Spectrum, parse_eigenvalue_file


def test_bolza_fixture(bolza_file):
    ef = parse_eigenvalue_file(bolza_file, closed=True)
    spec = ef.parsed
    assert len(spec) == 32
    assert not ef.inserted_zero and ef.skipped_lines == 0
    assert spec.eigenvalues[0] == 0.0
    assert spec.max_known == pytest.approx(30.8330427379325496581)
    assert spec.count_upto(20.0) == 20
    assert spec.nonzero_upto(4.0).size == 3


def test_comments_junk_and_closed_flag(tmp_path, caplog):
    p = tmp_path / "eigs.txt"
    p.write_text("# Bolza\n\n3.5\n1.25, multiplicity noted\nfoo\n-2\n2.0\n", encoding="utf-8")
    ef = parse_eigenvalue_file(p, closed=True, max_known=4.0)
    assert ef.skipped_lines == 2
    assert ef.inserted_zero
    assert ef.parsed.eigenvalues == (0.0, 1.25, 2.0, 3.5)
    assert ef.parsed.max_known == 4.0
    assert "skipped 2 line(s)" in caplog.text


def test_sqrt_input_squares_values(tmp_path):
    p = tmp_path / "lams.txt"
    p.write_text("2\n0.5\n", encoding="utf-8")
    spec = parse_eigenvalue_file(p, sqrt_input=True).parsed
    assert spec.eigenvalues == (0.25, 4.0)


def test_unreadable_or_empty_files(tmp_path):
    with pytest.raises(SpectrumFileError):
        parse_eigenvalue_file(tmp_path / "missing.txt")
    p = tmp_path / "empty.txt"
    p.write_text("# nothing here\n", encoding="utf-8")
    with pytest.raises(SpectrumFileError):
        parse_eigenvalue_file(p)


def test_spectrum_validation():
    with pytest.raises(ValidationError):
        Spectrum((2.0, 1.0))
    with pytest.raises(ValidationError):
        Spectrum((-1.0,))
    with pytest.raises(ValidationError):
        Spectrum((0.0, math.inf))
    spec = Spectrum.from_values([3.0, 0.0, 1.0])
    assert spec.eigenvalues == (0.0, 1.0, 3.0)
    assert spec.max_known == 3.0
    spec.check_complete(3.0)
    with pytest.raises(ValidationError):
        spec.check_complete(3.5)
    assert Spectrum(()).array.size == 0
