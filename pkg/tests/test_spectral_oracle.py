import csv
import io
import math

import pytest

from instantons import spectral_oracle as so
from instantons.errors import UnconvergedBoundary
from instantons.potentials import PotentialModel


def test_grid_validation():
    with pytest.raises(ValueError):
        so.GridSpec(0.0, 1000)
    with pytest.raises(ValueError):
        so.GridSpec(3.0, 50)
    with pytest.raises(ValueError):
        so.diagonalize(PotentialModel.triple_well(30.0), so.GridSpec(3.0, 500))


def test_boundary_leakage_detected():
    narrow = so.GridSpec(2.0, 1000)
    with pytest.raises(UnconvergedBoundary):
        so.diagonalize(PotentialModel.harmonic(1.0), narrow, 3)
    spec = so.diagonalize(PotentialModel.harmonic(1.0), narrow, 3, check_boundary=False)
    assert not spec.converged


def test_richardson_improves_harmonic_levels():
    spec = so.diagonalize(PotentialModel.harmonic(1.0), so.GridSpec(10.0, 2000), 3)
    raw_err = max(abs(e - (n + 0.5)) for n, e in enumerate(spec.raw_energies))
    err = max(abs(e - (n + 0.5)) for n, e in enumerate(spec.energies))
    assert err < raw_err / 100
    assert [p.value for p in spec.parities] == ["even", "odd", "even"]


def test_double_well_doublet():
    spec = so.diagonalize(PotentialModel.double_well(10.0), so.GridSpec(3.0, 2000), 2)
    assert spec.parities == (so.Parity.EVEN, so.Parity.ODD)
    assert 0 < spec.energies[1] - spec.energies[0] < 0.1 * spec.energies[0]


def test_eigenproduct_matches_gy_and_converges():
    from instantons import fluctuations, instanton

    omega, T = 1.0, 10.0
    gy = fluctuations.gy_terminal_zero_mode(instanton.closed_form_instanton(omega), T)
    exact = math.exp(gy.log - fluctuations.reference_terminal(1.5, T).log)
    coarse = so.stability_eigenproduct_ratio(omega, T, 1000)
    fine = so.stability_eigenproduct_ratio(omega, T, 2000)
    plain = so.stability_eigenproduct_ratio(omega, T, 2000, extrapolate=False)
    assert abs(fine / exact - 1) < abs(coarse / exact - 1)
    assert abs(fine / exact - 1) < abs(plain / exact - 1)


def test_eigenproduct_of_identical_operators():
    w = lambda tau: 2.0 + 0.0 * tau
    assert so.eigenproduct_log_ratio(w, w, 5.0, 500) == 0.0


def test_compare_report_outputs():
    table = so.compare_report(10.0)
    d = table.to_dict()
    assert set(d) == {"grid", "summary", "rows"}
    assert d["summary"]["predicted_splitting"] == pytest.approx(2.39151563791183, rel=1e-12)
    assert d["summary"]["central_harmonic_energy"] == 5.0
    assert d["summary"]["alternative_density"] == pytest.approx(d["summary"]["density"] / math.sqrt(2))
    rows = list(csv.reader(io.StringIO(table.to_csv(lambda v: format(v, ".17g")))))
    assert rows[0] == ["level", "exact", "parity", "predicted", "difference"]
    assert len(rows) == 4


def test_spectrum_to_dict():
    spec = so.diagonalize(PotentialModel.triple_well(8.0), so.GridSpec(), 3)
    out = spec.to_dict()
    assert out["parities"] == ["even", "odd", "even"]
    assert out["converged"] is True
