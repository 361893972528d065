"""
Dilute instanton gas for the three-minimum chain -1 -- 0 -- +1.

Every jump between adjacent minima carries the same action omega/4, so a
configuration of k jumps contributes (omega T d)^k / k! times the number of
admissible jump sequences.  For 0 -> +1 that number is 2^((k-1)/2) for odd
k; the sum collapses to sinh(omega T d) once the sqrt(2) per jump is folded
into the density d.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate
from scipy.optimize import least_squares

from .errors import EnumerationTooLarge, FitDegenerate

WELLS = (-1, 0, 1)
ENUMERATION_CAP = 30
# mean instanton separation must exceed this many widths 1/omega
MIN_SEPARATION_WIDTHS = 10.0


def instanton_density(omega):
    """d = sqrt(8 / 3 pi) sqrt(S) exp(-S) with S = omega / 4.

    Accepts numpy arrays and complex arguments (complex-step derivatives).
    """
    action = np.asarray(omega) / 4.0
    return np.sqrt(8.0 / (3.0 * np.pi)) * np.sqrt(action) * np.exp(-action)


@dataclass(frozen=True)
class GasConfigurationCount:
    k: int
    endpoints: tuple[int, int]
    count: int


def _check_well(well):
    if well not in WELLS:
        raise ValueError(f"well index must be one of {WELLS}, got {well!r}")


@lru_cache(maxsize=None)
def _enumerate(k: int, start: int, end: int) -> int:
    count = 0
    stack = [(start, 0)]
    while stack:
        site, steps = stack.pop()
        if steps == k:
            count += site == end
            continue
        remaining = k - steps
        for nxt in (site - 1, site + 1):
            # prune walks that leave the chain or cannot reach the end in time
            if -1 <= nxt <= 1 and abs(end - nxt) <= remaining - 1:
                stack.append((nxt, steps + 1))
    return count


def count_configurations(k: int, from_well: int, to_well: int) -> GasConfigurationCount:
    """Count jump sequences of length k by exhaustive walk enumeration."""
    if k < 0:
        raise ValueError("k must be non-negative")
    _check_well(from_well)
    _check_well(to_well)
    if k > ENUMERATION_CAP:
        raise EnumerationTooLarge(f"k={k} exceeds the enumeration cap {ENUMERATION_CAP}; use walk_count")
    return GasConfigurationCount(k, (from_well, to_well), _enumerate(k, from_well, to_well))


def walk_count(k: int, from_well: int, to_well: int) -> int:
    """Same count from the k-th power of the chain's adjacency matrix (exact integers)."""
    _check_well(from_well)
    _check_well(to_well)
    adjacency = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=object)
    power = np.identity(3, dtype=int).astype(object)
    for _ in range(k):
        power = power.dot(adjacency)
    return int(power[from_well + 1, to_well + 1])


def closed_form_count(k: int) -> int:
    """2^((k-1)/2) for odd k, 0 for even k: the 0 -> +1 configuration factor."""
    return 2 ** ((k - 1) // 2) if k % 2 else 0


def translational_volume(k: int, omega: float, T: float) -> float:
    """Volume of ordered centers -T/2 < tau_1 < ... < tau_k < T/2 in units of 1/omega."""
    if k < 0:
        raise ValueError("k must be non-negative")
    return (omega * T) ** k / math.factorial(k)


def ordered_volume_numeric(k: int, omega: float, T: float) -> float:
    """The same volume by nested adaptive quadrature, for k <= 4."""
    if not 0 <= k <= 4:
        raise ValueError("numeric volume is only provided for 0 <= k <= 4")
    if k == 0:
        return 1.0
    lo = -0.5 * T

    def upper(*outer):
        # the innermost variable runs up to the next center
        return outer[0] if outer else 0.5 * T

    ranges = [(lambda *args: (lo, upper(*args)))] * k
    val, _ = integrate.nquad(lambda *args: omega ** k, ranges, opts={"epsabs": 1e-12, "epsrel": 1e-12})
    return val


def _odd_series(x: float, terms: int | None) -> float:
    if terms is None:
        return math.sinh(x)
    return math.fsum(x ** (2 * j + 1) / math.factorial(2 * j + 1) for j in range(terms))


def log_transition_amplitude(omega: float, T: float, terms: int | None = None) -> float:
    """ln <1| exp(-H T) |0> in the dilute gas, summed in closed form or over ``terms`` odd orders."""
    if omega <= 0 or T <= 0:
        raise ValueError("omega and T must be positive")
    x = omega * T * float(instanton_density(omega))
    if terms is None and x > 700.0:
        log_sum = x - math.log(2.0) + math.log1p(-math.exp(-2.0 * x))
    else:
        log_sum = math.log(_odd_series(x, terms))
    return 0.5 * math.log(3.0 * omega / (4.0 * math.pi)) - 0.75 * omega * T + log_sum


def transition_amplitude(omega: float, T: float, terms: int | None = None) -> float:
    """(3 omega / 4 pi)^(1/2) exp(-3 omega T / 4) sinh(omega T d).

    ``terms`` truncates sinh to its first odd-power terms; ``None`` uses the
    closed form.  Evaluated directly while the factors are representable,
    which keeps the relative error at a few ulps; the log form would add
    roughly |ln amplitude| ulps.
    """
    if omega <= 0 or T <= 0:
        raise ValueError("omega and T must be positive")
    x = omega * T * float(instanton_density(omega))
    if 0.75 * omega * T < 700.0 and x < 700.0:
        return (math.sqrt(3.0 * omega / (4.0 * math.pi)) * math.exp(-0.75 * omega * T)
                * _odd_series(x, terms))
    return math.exp(log_transition_amplitude(omega, T, terms))


def return_amplitude(omega: float, T: float, terms: int = 30) -> float:
    """<0| exp(-H T) |0> from even-k configurations weighted by enumerated counts.

    Derived quantity: each jump carries omega T d / sqrt(2) and the counts
    come from ``count_configurations``, not from a closed form.  The
    prefactor is the unsplit averaged oscillator, (3 omega / 2 pi)^(1/2).
    """
    if omega <= 0 or T <= 0:
        raise ValueError("omega and T must be positive")
    w = omega * T * float(instanton_density(omega)) / math.sqrt(2.0)
    series = math.fsum(
        count_configurations(2 * j, 0, 0).count * w ** (2 * j) / math.factorial(2 * j)
        for j in range(min(terms, ENUMERATION_CAP // 2 + 1))
    )
    return math.sqrt(3.0 * omega / (2.0 * math.pi)) * math.exp(-0.75 * omega * T) * series


@dataclass(frozen=True)
class DiluteGasSpectrum:
    omega: float
    action: float
    density: float
    reference_energy: float
    levels: tuple[float, float, float]
    dilute: bool

    def to_dict(self) -> dict:
        return asdict(self)


def predicted_spectrum(omega: float, min_separation: float = MIN_SEPARATION_WIDTHS) -> DiluteGasSpectrum:
    """Tunneling-split triplet 3 omega/4 - omega d, 3 omega/4, 3 omega/4 + omega d.

    ``dilute`` is False when the mean instanton separation 1/d is shorter
    than ``min_separation`` instanton widths 1/omega.
    """
    if omega <= 0:
        raise ValueError("omega must be positive")
    d = float(instanton_density(omega))
    center = 0.75 * omega
    split = omega * d
    return DiluteGasSpectrum(
        omega=float(omega),
        action=omega / 4.0,
        density=d,
        reference_energy=center,
        levels=(center - split, center, center + split),
        dilute=bool(1.0 / d >= min_separation / omega),
    )


def predicted_log_splitting_slope(omega: float, step: float = 1e-20) -> float:
    """d ln(2 omega d) / d omega by complex-step differentiation of the density."""
    z = complex(omega, step)
    return float(np.imag(np.log(2.0 * z * instanton_density(z))) / step)


def analytic_log_splitting_slope(omega: float) -> float:
    return -0.25 + 1.5 / omega


def extract_energies(amplitude, T_grid) -> tuple[float, float]:
    """Decay constants of A (exp(-E_low T) - exp(-E_high T)) sampled on ``T_grid``.

    A seed comes from the linear recurrence two exponentials satisfy on an
    equally spaced grid (exact on four points) or from the log slopes
    otherwise.  It is then refined by least squares on ln|amplitude| with
    the three-parameter form above.  Working with logarithms keeps the
    exponentially small correction term resolvable to near rounding level.

    Raises
    ------
    FitDegenerate
        When the data are indistinguishable from a single exponential.
    """
    T = np.asarray(T_grid, dtype=float)
    if T.ndim != 1 or T.size < 4 or np.any(np.diff(T) <= 0):
        raise ValueError("T_grid must be strictly increasing with at least 4 points")
    y = np.array([amplitude(t) for t in T], dtype=float)
    if not np.all(np.isfinite(y)) or np.any(y == 0):
        raise FitDegenerate("amplitude vanishes or is not finite on the grid")
    if not (np.all(y > 0) or np.all(y < 0)):
        raise FitDegenerate("amplitude changes sign on the grid")
    steps = np.diff(T)
    if np.allclose(steps, steps[0], rtol=1e-12, atol=0.0):
        e_low, e_high = _recurrence_fit(T, y, steps[0])
    else:
        e_low, e_high = _slope_seed(T, y)
    e_low, e_high = _log_refine(T, np.log(np.abs(y)), e_low, e_high)
    if (e_high - e_low) * (T[-1] - T[0]) < 1e-6:
        raise FitDegenerate("decay constants are indistinguishable on this grid")
    return e_low, e_high


def _recurrence_fit(T, y, dT):
    # remove the dominant decay so the samples are O(1); the roots shift accordingly
    rate = math.log(y[0] / y[1]) / dT
    z = y / y[0] * np.exp(rate * (T - T[0]))
    rows = np.column_stack([z[1:-1], z[:-2]])
    rhs = z[2:]
    if z.size == 4:
        det = rows[0, 0] * rows[1, 1] - rows[0, 1] * rows[1, 0]
        scale = np.max(np.abs(rows)) ** 2
        if abs(det) <= 1e-14 * scale:
            raise FitDegenerate("samples follow a single exponential")
        coef = np.linalg.solve(rows, rhs)
    else:
        coef, *_ = np.linalg.lstsq(rows, rhs, rcond=None)
    p, q = coef
    disc = p * p + 4.0 * q
    if disc <= 0:
        raise FitDegenerate("recurrence roots are not real and distinct")
    sq = math.sqrt(disc)
    r_big, r_small = 0.5 * (p + sq), 0.5 * (p - sq)
    # p * r_small loses precision when the roots differ by orders of magnitude
    r_small = -q / r_big
    if not (r_big > 0 and r_small > 0):
        raise FitDegenerate("recurrence roots are not positive")
    if (r_big - r_small) / r_big < 1e-6 * dT:
        raise FitDegenerate("decay constants are indistinguishable on this grid")
    e_low = rate - math.log(r_big) / dT
    e_high = rate - math.log(r_small) / dT
    return e_low, e_high


def _slope_seed(T, y):
    slopes = -np.diff(np.log(np.abs(y))) / np.diff(T)
    e_low = float(slopes[-1])
    gap = abs(float(slopes[0] - slopes[-1]))
    if gap * (T[-1] - T[0]) < 1e-10:
        raise FitDegenerate("samples follow a single exponential")
    # slope excess at the first node is gap_E exp(-gap_E T0) to leading order
    return e_low, e_low + max(gap, 1.0 / (T[-1] - T[0]))


def _log_refine(T, log_y, e_low, e_high):
    def model(params):
        log_a, lo, gap = params
        return log_a - lo * T + np.log1p(-np.exp(-gap * T))

    def residual(params):
        return model(params) - log_y

    def jacobian(params):
        _, _, gap = params
        e = np.exp(-gap * T)
        return np.column_stack([np.ones_like(T), -T, T * e / (1.0 - e)])

    gap0 = e_high - e_low
    log_a0 = float(np.mean(log_y + e_low * T - np.log1p(-np.exp(-gap0 * T))))
    fit = least_squares(residual, [log_a0, e_low, gap0], jac=jacobian, method="lm",
                        xtol=1e-15, ftol=1e-15, gtol=1e-15)
    _, lo, gap = fit.x
    if not (gap > 0 and np.all(np.isfinite(fit.x))):
        raise FitDegenerate("refinement did not keep two distinct decay constants")
    return float(lo), float(lo + gap)
