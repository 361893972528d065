"""
Quick invariant checks over every pipeline stage.

Each check returns a ``CheckResult``; ``run_all`` evaluates them in a fixed
order so the report is reproducible.  ``check_determinant_document``
revalidates a determinant report read back from JSON.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np

from . import dilute_gas, fluctuations, instanton, spectral_oracle
from .potentials import PotentialModel


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    value: float
    limit: float
    detail: str = ""

    def to_dict(self) -> dict:
        return asdict(self)


def _result(name, value, limit, detail=""):
    return CheckResult(name, bool(value <= limit), float(value), float(limit), detail)


def harmonic_calibration():
    worst = 0.0
    for nu in (0.5, 1.0, 2.0):
        for T in (5.0, 10.0, 20.0):
            gy = fluctuations.gy_propagator(fluctuations.StabilityOperator.constant(nu, T))
            exact = fluctuations.harmonic_propagator(nu, T)
            worst = max(worst, abs(gy / exact - 1.0))
    return _result("harmonic_calibration", worst, 1e-8, "GY propagator vs closed form")


def instanton_profile():
    profile = instanton.numeric_instanton(PotentialModel.triple_well(1.0), 0.0, 1.0)
    exact = instanton.closed_form_instanton(1.0)
    taus = np.linspace(-20.0, 20.0, 4001)
    err = float(np.max(np.abs(profile(taus) - exact(taus))))
    return _result("instanton_profile", err, 1e-8, "sup error on |tau| <= 20")


def instanton_action():
    profile = instanton.numeric_instanton(PotentialModel.triple_well(1.0), 0.0, 1.0)
    err = max(abs(profile.action - 0.25), abs(instanton.action_tau_integral(profile) - 0.25))
    return _result("instanton_action", err, 1e-10, "x-space and tau-space action vs omega/4")


def zero_mode_checks():
    out = []
    for omega in (1.0, 4.0):
        profile = instanton.numeric_instanton(PotentialModel.triple_well(omega), 0.0, 1.0)
        mode = instanton.zero_mode(profile)
        D, C = instanton.asymptotic_constants(profile)
        target = 2.0 * math.sqrt(omega)
        out.append(_result(f"zero_mode_norm[omega={omega:g}]", abs(mode.norm_check - 1.0), 1e-8))
        if omega == 1.0:
            # the second-difference truncation grows like omega^4 h^2
            out.append(_result("zero_mode_residual[omega=1]", mode.residual, 1e-6, "h = 1e-3"))
        out.append(_result(f"asymptotic_constants[omega={omega:g}]",
                           max(abs(D - target), abs(C - target)), 1e-6, "D = C = 2 sqrt(omega)"))
    return out


def lowest_eigenvalue():
    profile = instanton.closed_form_instanton(1.0)
    op = fluctuations.StabilityOperator.around(profile, 10.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        numeric = fluctuations.lowest_eigenvalue_numeric(op, 4000)
    analytic = fluctuations.lowest_eigenvalue_analytic(1.0, 2.0, 10.0)
    return _result("lowest_eigenvalue", abs(numeric / analytic - 1.0), 0.05, "omega = 1, T = 10")


def combinatorics():
    bad = 0
    for k in range(16):
        got = dilute_gas.count_configurations(k, 0, 1).count
        bad += got != dilute_gas.closed_form_count(k)
    return _result("combinatorics", bad, 0, "enumeration vs 2^((k-1)/2), k <= 15")


def series_closed_form():
    worst = 0.0
    for x in (0.1, 1.0, 5.0, 10.0):
        worst = max(worst, abs(dilute_gas._odd_series(x, 30) / math.sinh(x) - 1.0))
    return _result("series_closed_form", worst, 1e-12, "30 odd terms vs sinh")


def energy_round_trip():
    worst = 0.0
    for omega in (4.0, 10.0, 20.0):
        levels = dilute_gas.predicted_spectrum(omega).levels
        lo, hi = dilute_gas.extract_energies(
            lambda t: dilute_gas.transition_amplitude(omega, t), [5.0, 10.0, 15.0, 20.0])
        worst = max(worst, abs(lo / levels[0] - 1.0), abs(hi / levels[2] - 1.0))
    return _result("energy_round_trip", worst, 1e-6, "omega in {4, 10, 20}")


def splitting_symmetry():
    levels = dilute_gas.predicted_spectrum(10.0).levels
    asym = abs((levels[2] - levels[1]) - (levels[1] - levels[0]))
    return _result("splitting_symmetry", asym, 0.0)


def harmonic_oracle():
    grid = spectral_oracle.GridSpec(10.0, 2000)
    spec = spectral_oracle.diagonalize(PotentialModel.harmonic(1.0), grid, 3)
    err = max(abs(e - (n + 0.5)) for n, e in enumerate(spec.energies))
    return _result("harmonic_oracle", err, 1e-6, "(n + 1/2) nu, nu = 1")


def oracle_parity():
    spec = spectral_oracle.diagonalize(PotentialModel.triple_well(12.0), spectral_oracle.GridSpec(), 2)
    ok = [p.value for p in spec.parities] == ["even", "odd"]
    return CheckResult("oracle_parity", ok, 0.0 if ok else 1.0, 0.0, "omega = 12")


def log_slope():
    worst = 0.0
    for omega in (8.0, 12.0, 16.0, 20.0):
        worst = max(worst, abs(dilute_gas.predicted_log_splitting_slope(omega)
                               - dilute_gas.analytic_log_splitting_slope(omega)))
    return _result("log_slope", worst, 1e-10)


def determinant_identities():
    report = fluctuations.determinant_report(10.0, 3.0)
    failures = fluctuations.check_report(report.to_dict())
    return CheckResult("determinant_identities", not failures, float(len(failures)), 0.0, "; ".join(failures))


CHECKS = (
    harmonic_calibration,
    instanton_profile,
    instanton_action,
    zero_mode_checks,
    lowest_eigenvalue,
    combinatorics,
    series_closed_form,
    energy_round_trip,
    splitting_symmetry,
    harmonic_oracle,
    oracle_parity,
    log_slope,
    determinant_identities,
)


def run_all() -> list[CheckResult]:
    results = []
    for check in CHECKS:
        out = check()
        results.extend(out if isinstance(out, list) else [out])
    return results


def check_determinant_document(document: dict) -> list[CheckResult]:
    """Revalidate a determinant report, either bare or wrapped as CLI output."""
    report = document.get("result", document)
    missing = [k for k in ("omega", "T", "raw_ratio", "lowest_eigenvalue", "reduced_ratio", "jacobian",
                           "log_gy_value", "log_reference_value") if k not in report]
    if missing:
        return [CheckResult("document_fields", False, float(len(missing)), 0.0, "missing " + ", ".join(missing))]
    failures = fluctuations.check_report(report)
    results = [CheckResult("document_identities", not failures, float(len(failures)), 0.0, "; ".join(failures))]
    # recompute from the stored parameters
    fresh = fluctuations.determinant_report(report["omega"], report["T"], report.get("nu"))
    drift = abs(fresh.raw_ratio / report["raw_ratio"] - 1.0)
    results.append(_result("document_reproducible", drift, 1e-12, "recomputed raw_ratio"))
    return results
