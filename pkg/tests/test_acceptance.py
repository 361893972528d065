"""
Acceptance oracles, one group per criterion.

Run with ``pytest tests/test_acceptance.py``; the terminal summary prints
one PASS/FAIL line per criterion.
"""
import math
import subprocess
import sys
import warnings

import numpy as np
import pytest

from instantons import dilute_gas, fluctuations, instanton, spectral_oracle
from instantons.potentials import PotentialModel


def criterion(number, title):
    return pytest.mark.criterion(number, title)


# 1
@criterion(1, "harmonic propagator via Gelfand-Yaglom")
@pytest.mark.parametrize("nu", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("T", [5.0, 10.0, 20.0])
def test_harmonic_propagator_calibration(nu, T):
    op = fluctuations.StabilityOperator.constant(nu, T)
    exact = math.sqrt(nu / math.pi) / math.sqrt(2.0 * math.sinh(nu * T))
    assert fluctuations.gy_propagator(op) == pytest.approx(exact, rel=1e-8)


@criterion(1, "harmonic propagator via Gelfand-Yaglom")
def test_harmonic_propagator_example_value():
    op = fluctuations.StabilityOperator.constant(1.0, 10.0)
    assert fluctuations.gy_propagator(op) == pytest.approx(3.8015e-3, rel=1e-4)


# 2
@pytest.fixture(scope="module")
def numeric_profile_w1():
    return instanton.numeric_instanton(PotentialModel.triple_well(1.0), 0.0, 1.0)


@criterion(2, "numeric instanton matches the closed form")
def test_instanton_sup_norm(numeric_profile_w1):
    taus = np.linspace(-20.0, 20.0, 8001)
    exact = np.sqrt(0.5 * (1.0 + np.tanh(taus)))
    assert np.max(np.abs(numeric_profile_w1(taus) - exact)) < 1e-8


@criterion(2, "numeric instanton matches the closed form")
def test_instanton_action(numeric_profile_w1):
    assert abs(numeric_profile_w1.action - 0.25) < 1e-10
    assert abs(instanton.action_tau_integral(numeric_profile_w1) - 0.25) < 1e-10


# 3
@criterion(3, "zero mode normalization, residual and tail constants")
def test_zero_mode_norm_and_residual(numeric_profile_w1):
    mode = instanton.zero_mode(numeric_profile_w1, residual_step=1e-3)
    assert abs(mode.norm_check - 1.0) < 1e-8
    assert mode.residual < 1e-6


@criterion(3, "zero mode normalization, residual and tail constants")
@pytest.mark.parametrize("omega", [1.0, 4.0])
def test_asymptotic_constants(omega):
    profile = instanton.numeric_instanton(PotentialModel.triple_well(omega), 0.0, 1.0)
    D, C = instanton.asymptotic_constants(profile, fit=True)
    assert abs(D - 2.0 * math.sqrt(omega)) < 1e-6
    assert abs(C - 2.0 * math.sqrt(omega)) < 1e-6


# 4
@criterion(4, "lowest eigenvalue 8 omega^2 exp(-omega T)")
@pytest.mark.parametrize("T", [8.0, 10.0, 12.0])
def test_lowest_eigenvalue(T):
    op = fluctuations.StabilityOperator.around(instanton.closed_form_instanton(1.0), T)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        numeric = fluctuations.lowest_eigenvalue_numeric(op, 4000)
    assert numeric == pytest.approx(8.0 * math.exp(-T), rel=0.05)


# 5
@criterion(5, "Gelfand-Yaglom ratio vs eigenvalue product")
@pytest.mark.parametrize("route", ["ivp", "zero_mode"])
def test_gy_vs_eigenproduct(route):
    omega, T = 1.0, 10.0
    profile = instanton.closed_form_instanton(omega)
    if route == "ivp":
        gy = fluctuations.gy_terminal(fluctuations.StabilityOperator.around(profile, T))
    else:
        gy = fluctuations.gy_terminal_zero_mode(profile, T)
    ref = fluctuations.reference_terminal(1.5 * omega, T)
    ratio = math.exp(gy.log - ref.log)
    brute = spectral_oracle.stability_eigenproduct_ratio(omega, T, grid_points=2000)
    assert ratio == pytest.approx(brute, rel=1e-3)


# 6
@criterion(6, "configuration counts 2^((k-1)/2)")
@pytest.mark.parametrize("k", range(16))
def test_configuration_counts(k):
    got = dilute_gas.count_configurations(k, 0, 1).count
    assert got == (2 ** ((k - 1) // 2) if k % 2 else 0)


# 7
@criterion(7, "dilute-gas series and energy round trip")
@pytest.mark.parametrize("omega,T", [(10.0, 1.0), (4.0, 5.0), (20.0, 2.0), (4.0, 7.0)])
def test_series_matches_sinh(omega, T):
    x = omega * T * float(dilute_gas.instanton_density(omega))
    assert x <= 10.0
    series = dilute_gas.transition_amplitude(omega, T, terms=30)
    closed = dilute_gas.transition_amplitude(omega, T)
    assert series == pytest.approx(closed, rel=1e-12)


@criterion(7, "dilute-gas series and energy round trip")
@pytest.mark.parametrize("omega", [4.0, 10.0, 20.0])
@pytest.mark.parametrize("grid", [[5.0, 10.0, 15.0, 20.0], [1.0, 2.0, 3.0, 4.0]])
def test_energy_round_trip(omega, grid):
    levels = dilute_gas.predicted_spectrum(omega).levels
    lo, hi = dilute_gas.extract_energies(lambda t: dilute_gas.transition_amplitude(omega, t), grid)
    assert lo == pytest.approx(levels[0], rel=1e-6)
    assert hi == pytest.approx(levels[2], rel=1e-6)


# 8
@criterion(8, "predicted triplet at omega = 10")
def test_predicted_spectrum():
    levels = dilute_gas.predicted_spectrum(10.0).levels
    S = 2.5
    d = math.sqrt(8.0 / (3.0 * math.pi)) * math.sqrt(S) * math.exp(-S)
    composed = (7.5 - 10.0 * d, 7.5, 7.5 + 10.0 * d)
    for got, want, quoted in zip(levels, composed, (6.3042, 7.5, 8.6958)):
        assert abs(got - want) < 5e-5
        assert abs(got - quoted) < 5e-5
    assert (levels[2] - levels[1]) - (levels[1] - levels[0]) == 0.0


# 9
@criterion(9, "oracle spectra, parities, reports and log slope")
@pytest.mark.parametrize("nu,half_width", [(0.5, 14.0), (1.0, 10.0), (2.0, 7.0)])
def test_harmonic_oracle(nu, half_width):
    spec = spectral_oracle.diagonalize(PotentialModel.harmonic(nu), spectral_oracle.GridSpec(half_width, 2000), 4)
    for n, e in enumerate(spec.energies):
        assert abs(e - (n + 0.5) * nu) < 1e-6


@criterion(9, "oracle spectra, parities, reports and log slope")
@pytest.mark.parametrize("omega", [8.0, 12.0, 16.0, 20.0])
def test_triple_well_parities_and_report(omega):
    table = spectral_oracle.compare_report(omega)
    assert [r["parity"] for r in table.rows][:2] == ["even", "odd"]
    assert len(table.rows) == 3
    assert all(math.isfinite(r["exact"]) and math.isfinite(r["predicted"]) for r in table.rows)
    summary = table.summary()
    assert abs(summary["predicted_log_slope"] - (-0.25 + 1.5 / omega)) < 1e-10
    assert summary["analytic_log_slope"] == -0.25 + 1.5 / omega


# 10
@criterion(10, "sweep output is byte-identical across runs")
def test_sweep_determinism():
    cmd = [sys.executable, "-m", "instantons", "sweep", "--omega-range", "4:30:2", "--format", "csv"]
    first = subprocess.run(cmd, capture_output=True, check=True).stdout
    second = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert first == second
    assert len(first.decode().strip().splitlines()) == 2 + 14


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
