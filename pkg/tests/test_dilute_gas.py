import math

import pytest

from instantons import dilute_gas as dg
from instantons.errors import EnumerationTooLarge, FitDegenerate


def test_density_decomposition():
    for omega in (4.0, 10.0, 20.0):
        S = omega / 4
        d = float(dg.instanton_density(omega))
        assert math.log(d) + S - math.log(math.sqrt(8 / (3 * math.pi)) * math.sqrt(S)) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("k", range(0, 21))
def test_enumeration_matches_matrix_power(k):
    for a in dg.WELLS:
        for b in dg.WELLS:
            assert dg.count_configurations(k, a, b).count == dg.walk_count(k, a, b)


def test_enumeration_limits():
    with pytest.raises(EnumerationTooLarge):
        dg.count_configurations(31, 0, 1)
    with pytest.raises(ValueError):
        dg.count_configurations(3, 0, 2)
    assert dg.walk_count(41, 0, 1) == 2 ** 20


def test_translational_volume():
    for k in range(5):
        assert dg.ordered_volume_numeric(k, 2.0, 1.5) == pytest.approx(dg.translational_volume(k, 2.0, 1.5), rel=1e-9)


def test_amplitude_forms_agree():
    omega, T = 10.0, 1.0
    a = dg.transition_amplitude(omega, T)
    assert a == pytest.approx(1.28339e-3, rel=1e-5)
    assert math.log(a) == pytest.approx(dg.log_transition_amplitude(omega, T), rel=1e-14)
    # the log form stays finite where the amplitude underflows
    assert math.isfinite(dg.log_transition_amplitude(10.0, 500.0))
    assert dg.transition_amplitude(10.0, 500.0) == 0.0


def test_return_amplitude_is_cosh():
    omega, T = 10.0, 2.0
    x = omega * T * float(dg.instanton_density(omega))
    expected = math.sqrt(3 * omega / (2 * math.pi)) * math.exp(-0.75 * omega * T) * math.cosh(x)
    assert dg.return_amplitude(omega, T) == pytest.approx(expected, rel=1e-13)


def test_predicted_spectrum_and_dilute_flag():
    spec = dg.predicted_spectrum(4.0)
    assert spec.levels == pytest.approx((1.6442645905544784, 3.0, 4.3557354094455221), rel=1e-14)
    assert spec.dilute
    assert not dg.predicted_spectrum(0.5).dilute
    assert dg.predicted_spectrum(4.0, min_separation=1e6).dilute is False
    assert set(spec.to_dict()) == {"omega", "action", "density", "reference_energy", "levels", "dilute"}


def test_log_slope():
    for omega in (3.0, 8.0, 25.0):
        assert dg.predicted_log_splitting_slope(omega) == pytest.approx(dg.analytic_log_splitting_slope(omega), abs=1e-12)


def test_extract_energies_degenerate():
    with pytest.raises(FitDegenerate):
        dg.extract_energies(lambda t: math.exp(-2 * t), [1, 2, 3, 4])
    with pytest.raises(FitDegenerate):
        dg.extract_energies(lambda t: math.exp(-2 * t), [1, 2, 3.5, 4])


def test_extract_energies_synthetic_and_nonuniform():
    f = lambda t: 3.0 * (math.exp(-1.2 * t) - math.exp(-2.7 * t))
    for grid in ([0.5, 1, 1.5, 2], [0.3, 1, 2.2, 3.1, 4.0]):
        lo, hi = dg.extract_energies(f, grid)
        assert lo == pytest.approx(1.2, rel=1e-9) and hi == pytest.approx(2.7, rel=1e-9)


def test_extract_energies_validation():
    with pytest.raises(ValueError):
        dg.extract_energies(lambda t: 1.0, [1, 2, 3])
    with pytest.raises(ValueError):
        dg.extract_energies(lambda t: 1.0, [1, 3, 2, 4])
    with pytest.raises(FitDegenerate):
        dg.extract_energies(lambda t: 0.0, [1, 2, 3, 4])
