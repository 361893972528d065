"""
Brute-force spectra on a uniform grid.

Both the Schroedinger Hamiltonian and the stability operators are
discretized with second-order central differences and Dirichlet ends.
Energies and determinant log-ratios are Richardson-extrapolated from the
requested grid and one with half its spacing; the O(h^2) error would
otherwise dominate the comparisons these routines exist for.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field
from enum import Enum

import numpy as np

from . import _grid
from .dilute_gas import analytic_log_splitting_slope, predicted_log_splitting_slope, predicted_spectrum
from .errors import UnconvergedBoundary
from .instanton import closed_form_instanton
from .potentials import PotentialModel

LEAKAGE_LIMIT = 1e-8


class Parity(str, Enum):
    EVEN = "even"
    ODD = "odd"


@dataclass(frozen=True)
class GridSpec:
    half_width: float = 3.0
    points: int = 4000

    def __post_init__(self):
        if not self.half_width > 0:
            raise ValueError("half_width must be positive")
        if self.points < 200:
            raise ValueError("grid needs at least 200 points")

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / (self.points - 1)

    def check_resolution(self, model: PotentialModel):
        top = max(w.frequency for w in model.wells())
        if not self.spacing < 0.2 / top:
            raise ValueError(f"grid spacing {self.spacing:.4g} does not resolve frequency {top:.4g}")


@dataclass(frozen=True)
class OracleSpectrum:
    energies: tuple[float, ...]
    parities: tuple[Parity, ...]
    boundary_leakage: tuple[float, ...]
    raw_energies: tuple[float, ...] = field(default=())

    @property
    def converged(self) -> bool:
        return all(v < LEAKAGE_LIMIT for v in self.boundary_leakage)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["parities"] = [p.value for p in self.parities]
        out["converged"] = self.converged
        return out


def _hamiltonian(model, grid, points):
    x, h = _grid.interior_nodes(-grid.half_width, grid.half_width, points)
    diag, off = _grid.tridiagonal(model.value(x), h, kinetic=0.5)
    return x, h, diag, off


def diagonalize(
    model: PotentialModel,
    grid: GridSpec = GridSpec(),
    m: int = 3,
    richardson: bool = True,
    check_boundary: bool = True,
) -> OracleSpectrum:
    """Lowest ``m`` eigenpairs of H = -1/2 d^2/dx^2 + V on [-L, L].

    Parity is the sign of the overlap of psi(x) with psi(-x); leakage is
    the largest |psi| (normalized to unit L2 norm) at the two outermost
    interior nodes.

    Raises
    ------
    UnconvergedBoundary
        If any state leaks more than 1e-8 at the edges and
        ``check_boundary`` is set; enlarge ``half_width``.
    """
    if m < 1 or m > grid.points // 10:
        raise ValueError("m must satisfy 1 <= m <= points / 10")
    grid.check_resolution(model)
    x, h, diag, off = _hamiltonian(model, grid, grid.points)
    raw, vecs = _grid.eigenpairs(diag, off, m)
    energies = raw
    if richardson:
        _, _, diag_f, off_f = _hamiltonian(model, grid, _grid.refined_points(grid.points))
        fine = _grid.eigenvalues(diag_f, off_f, m)
        energies = _grid.richardson(raw, fine)

    psi = vecs / math.sqrt(h)
    parities = []
    leakage = []
    for j in range(m):
        overlap = float(np.dot(psi[:, j], psi[::-1, j]))
        parities.append(Parity.EVEN if overlap > 0 else Parity.ODD)
        leakage.append(float(max(abs(psi[0, j]), abs(psi[-1, j]))))
    spectrum = OracleSpectrum(
        energies=tuple(float(e) for e in energies),
        parities=tuple(parities),
        boundary_leakage=tuple(leakage),
        raw_energies=tuple(float(e) for e in raw),
    )
    if check_boundary and not spectrum.converged:
        raise UnconvergedBoundary(f"boundary leakage {max(leakage):.3e} exceeds {LEAKAGE_LIMIT}")
    return spectrum


def eigenproduct_log_ratio(curvature, reference_curvature, T: float, grid_points: int) -> float:
    """ln of prod(eps_j) / prod(eps_j^ref) over all interior modes of one grid."""
    nodes, h = _grid.interior_nodes(-0.5 * T, 0.5 * T, grid_points)
    diag, off = _grid.tridiagonal(curvature(nodes), h)
    diag_ref, off_ref = _grid.tridiagonal(reference_curvature(nodes), h)
    eps = _grid.eigenvalues(diag, off)
    eps_ref = _grid.eigenvalues(diag_ref, off_ref)
    if np.any(eps <= 0) or np.any(eps_ref <= 0):
        raise ValueError("operator is not positive definite on this grid")
    return float(np.sum(np.log(eps) - np.log(eps_ref)))


def stability_eigenproduct_ratio(
    omega: float,
    T: float,
    grid_points: int = 2000,
    nu: float | None = None,
    extrapolate: bool = True,
) -> float:
    """Determinant ratio of the instanton and constant-nu^2 operators by full diagonalization.

    With ``extrapolate`` the log-ratio from ``grid_points`` nodes is
    combined with that of the half-spacing grid.  The near-zero mode is
    shifted by O(h^2) in absolute terms, which is large relative to its
    exponentially small value, so the unextrapolated ratio converges slowly.
    """
    nu = 1.5 * omega if nu is None else nu
    profile = closed_form_instanton(omega)
    reference = lambda tau: np.full(np.shape(tau), nu * nu)
    coarse = eigenproduct_log_ratio(profile.curvature, reference, T, grid_points)
    if not extrapolate:
        return math.exp(coarse)
    fine = eigenproduct_log_ratio(profile.curvature, reference, T, _grid.refined_points(grid_points))
    return math.exp(_grid.richardson(coarse, fine))


@dataclass(frozen=True)
class ComparisonTable:
    """Exact versus dilute-gas levels for one omega.

    Nothing here asserts agreement: the exact low-lying levels of the
    triple well are not a symmetric triplet.
    """

    omega: float
    grid: GridSpec
    rows: tuple[dict, ...]
    exact_splitting: float
    predicted_splitting: float
    central_harmonic_energy: float
    lateral_harmonic_energy: float
    predicted_log_slope: float
    analytic_log_slope: float
    density: float
    dilute: bool

    def summary(self) -> dict:
        return {
            "omega": self.omega,
            "density": self.density,
            "dilute": self.dilute,
            "exact_splitting": self.exact_splitting,
            "predicted_splitting": self.predicted_splitting,
            "splitting_difference": self.exact_splitting - self.predicted_splitting,
            "central_harmonic_energy": self.central_harmonic_energy,
            "lateral_harmonic_energy": self.lateral_harmonic_energy,
            "predicted_log_slope": self.predicted_log_slope,
            "analytic_log_slope": self.analytic_log_slope,
            # one-jump prefactor sqrt(4/3 pi) in place of sqrt(8/3 pi)
            "alternative_density": self.density / math.sqrt(2.0),
            "alternative_predicted_splitting": self.predicted_splitting / math.sqrt(2.0),
        }

    def to_dict(self) -> dict:
        return {
            "grid": asdict(self.grid),
            "summary": self.summary(),
            "rows": [dict(r) for r in self.rows],
        }

    def to_csv(self, fmt=lambda v: v) -> str:
        columns = ["level", "exact", "parity", "predicted", "difference"]
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in self.rows:
            writer.writerow([row["level"], fmt(row["exact"]), row["parity"],
                             fmt(row["predicted"]), fmt(row["difference"])])
        return buf.getvalue()


def compare_report(omega: float, grid: GridSpec = GridSpec()) -> ComparisonTable:
    exact = diagonalize(PotentialModel.triple_well(omega), grid, 3)
    predicted = predicted_spectrum(omega)
    rows = []
    for n in range(3):
        rows.append({
            "level": n,
            "exact": exact.energies[n],
            "parity": exact.parities[n].value,
            "predicted": predicted.levels[n],
            "difference": exact.energies[n] - predicted.levels[n],
        })
    return ComparisonTable(
        omega=float(omega),
        grid=grid,
        rows=tuple(rows),
        exact_splitting=exact.energies[2] - exact.energies[0],
        predicted_splitting=predicted.levels[2] - predicted.levels[0],
        central_harmonic_energy=0.5 * omega,
        lateral_harmonic_energy=omega,
        predicted_log_slope=predicted_log_splitting_slope(omega),
        analytic_log_slope=analytic_log_splitting_slope(omega),
        density=predicted.density,
        dilute=predicted.dilute,
    )
