"""
Instanton solutions of the euclidean equation of motion.

A profile is stored in a reference orientation (increasing from the lower
to the upper well, centered at zero) and mapped to the requested one by a
time sign, a space sign and a center shift.  That keeps the anti-instanton
and mirror solutions exact copies of the computed one.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np
from scipy import integrate
from scipy.interpolate import CubicHermiteSpline
from scipy.special import expit, log_expit

from .errors import FitUnstable, NonAdjacentWells, QuadratureFailure
from .potentials import Family, PotentialModel

# plateau window for asymptotic fits, in units of the slower decay time
FIT_WINDOW = (8.0, 15.0)
FIT_RTOL = 1e-6


class _ClosedFormShape:
    """x_c(s) = sqrt((1 + tanh(omega s)) / 2) written with logistic functions."""

    def __init__(self, omega: float):
        self.omega = omega

    def position(self, s):
        return np.sqrt(expit(2.0 * self.omega * np.asarray(s, dtype=float)))

    def velocity(self, s):
        z = 2.0 * self.omega * np.asarray(s, dtype=float)
        return self.omega * np.sqrt(expit(z)) * expit(-z)

    def log_velocity(self, s):
        z = 2.0 * self.omega * np.asarray(s, dtype=float)
        return np.log(self.omega) + 0.5 * log_expit(z) + log_expit(-z)

    def curvature(self, s):
        u = expit(2.0 * self.omega * np.asarray(s, dtype=float))
        return 0.5 * self.omega ** 2 * (30.0 * u * u - 24.0 * u + 2.0)


class _TabulatedShape:
    """Monotone profile between wells ``a < b`` built from tau(x) by quadrature.

    The interpolated coordinate is y = ln(x - a) - ln(b - x).  It is smooth,
    tends to straight lines of slope mu_a and mu_b in the tails, and gives
    both distances to the wells with full relative precision.
    """

    def __init__(self, model, a, b, s_nodes, y_nodes, dy_nodes, x_nodes):
        self.model = model
        self.a, self.b = a, b
        self.width = b - a
        self._spline = CubicHermiteSpline(s_nodes, y_nodes, dy_nodes)
        self._s_lo, self._s_hi = s_nodes[0], s_nodes[-1]
        self._y_lo, self._y_hi = y_nodes[0], y_nodes[-1]
        self._dy_lo, self._dy_hi = dy_nodes[0], dy_nodes[-1]
        self._x_lo, self._x_hi = x_nodes[0], x_nodes[-1]

    def _y(self, s):
        s = np.asarray(s, dtype=float)
        inner = np.clip(s, self._s_lo, self._s_hi)
        y = self._spline(inner)
        y = np.where(s < self._s_lo, self._y_lo + self._dy_lo * (s - self._s_lo), y)
        return np.where(s > self._s_hi, self._y_hi + self._dy_hi * (s - self._s_hi), y)

    def _offsets(self, s):
        y = self._y(s)
        return self.width * expit(y), self.width * expit(-y)

    def _reduced_speed(self, x):
        # speed(x) / ((x - a)(b - x)); smooth and finite on [a, b]
        x = np.clip(x, self._x_lo, self._x_hi)
        return self.model.speed(x) / ((x - self.a) * (self.b - x))

    def position(self, s):
        p, q = self._offsets(s)
        return np.where(p <= q, self.a + p, self.b - q)

    def velocity(self, s):
        p, q = self._offsets(s)
        x = np.where(p <= q, self.a + p, self.b - q)
        return self._reduced_speed(x) * p * q

    def log_velocity(self, s):
        y = self._y(s)
        p = self.width * expit(y)
        x = np.where(y <= 0, self.a + p, self.b - self.width * expit(-y))
        return (np.log(self._reduced_speed(x)) + 2.0 * np.log(self.width)
                + log_expit(y) + log_expit(-y))

    def curvature(self, s):
        return self.model.second_derivative(self.position(s))


@dataclass(frozen=True)
class InstantonProfile:
    """One topological solution connecting adjacent minima.

    ``decay_rates`` and ``amplitude_constants`` describe the zero mode
    x_o(tau) ~ D exp(mu_- (tau - center)) as tau -> -inf and
    x_o(tau) ~ C exp(-mu_+ (tau - center)) as tau -> +inf, stored as
    (mu_-, mu_+) and (D, C).
    """

    endpoints: tuple[float, float]
    center: float
    action: float
    decay_rates: tuple[float, float]
    amplitude_constants: tuple[float, float]
    model: PotentialModel
    kind: str
    _shape: object = field(repr=False, compare=False)
    time_sign: int = 1
    space_sign: int = 1

    def _s(self, tau):
        return self.time_sign * (np.asarray(tau, dtype=float) - self.center)

    def __call__(self, tau):
        return self.space_sign * self._shape.position(self._s(tau))

    def velocity(self, tau):
        return self.space_sign * self.time_sign * self._shape.velocity(self._s(tau))

    def log_abs_velocity(self, tau):
        """ln |dx_c/dtau|, finite far beyond the range where the velocity underflows."""
        return self._shape.log_velocity(self._s(tau))

    def curvature(self, tau):
        """W(tau) = V''(x_c(tau)), the potential of the stability operator."""
        return self._shape.curvature(self._s(tau))

    @property
    def asymptotic_curvatures(self) -> tuple[float, float]:
        mu_minus, mu_plus = self.decay_rates
        return mu_minus ** 2, mu_plus ** 2

    @property
    def scale(self) -> float:
        """Slowest decay time of the tails, 1 / min(mu)."""
        return 1.0 / min(self.decay_rates)


def closed_form_instanton(omega: float, tau_c: float = 0.0) -> InstantonProfile:
    """The 0 -> 1 triple-well instanton in closed form."""
    if omega <= 0:
        raise ValueError("omega must be positive")
    amp = 2.0 * np.sqrt(omega)
    return InstantonProfile(
        endpoints=(0.0, 1.0),
        center=float(tau_c),
        action=omega / 4.0,
        decay_rates=(omega, 2.0 * omega),
        amplitude_constants=(amp, amp),
        model=PotentialModel.triple_well(omega),
        kind="closed_form",
        _shape=_ClosedFormShape(omega),
    )


def default_anchor(model: PotentialModel, a: float, b: float) -> float:
    """Position of the instanton at its center for wells a < b.

    For the triple well this is where x^2 is halfway between the squared
    endpoints (1/sqrt(2) for 0 -> 1), the crossing point of the tanh form;
    for the double well it is the symmetric midpoint.
    """
    if model.family is Family.TRIPLE_WELL:
        outer = a if abs(a) > abs(b) else b
        return float(np.copysign(np.sqrt(0.5 * (a * a + b * b)), outer))
    return 0.5 * (a + b)


def _quad(func, lo, hi, tolerance):
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(func, lo, hi, epsabs=0.1 * tolerance, epsrel=1e-13, limit=200)
        except integrate.IntegrationWarning as exc:
            raise QuadratureFailure(f"quadrature on [{lo}, {hi}] failed: {exc}") from exc
    return val, err


_GL_LO = np.polynomial.legendre.leggauss(10)
_GL_HI = np.polynomial.legendre.leggauss(20)


def _gauss_legendre(func, lo, hi, rule):
    nodes, weights = rule
    half = 0.5 * (hi - lo)
    pts = (lo + hi)[:, None] * 0.5 + half[:, None] * nodes[None, :]
    return half * (func(pts) @ weights)


def _interval_integrals(func, x, tolerance):
    """Integrals of ``func`` over consecutive [x_i, x_i+1].

    Two Gauss-Legendre orders are compared per interval; where they
    disagree by more than the per-interval share of ``tolerance`` the
    interval is redone with adaptive quadrature.
    """
    lo, hi = x[:-1], x[1:]
    coarse = _gauss_legendre(func, lo, hi, _GL_LO)
    fine = _gauss_legendre(func, lo, hi, _GL_HI)
    err = np.abs(fine - coarse)
    budget = 0.01 * tolerance / len(lo)
    for i in np.flatnonzero(~(err <= budget)):
        fine[i], err[i] = _quad(func, lo[i], hi[i], budget)
    return fine, float(err.sum())


def numeric_instanton(
    model: PotentialModel,
    from_well: float,
    to_well: float,
    tau_c: float = 0.0,
    tolerance: float = 1e-10,
    anchor: float | None = None,
    step: float = 0.01,
) -> InstantonProfile:
    """Instanton between adjacent minima by quadrature of dx/dtau = sqrt(2V).

    tau(x) = tau_c + int_anchor^x dx' / sqrt(2V(x')) is split into its two
    logarithmic well singularities, integrated analytically, and a bounded
    remainder integrated with adaptive quadrature.  The result is
    tabulated with node spacing ``step / mu`` and inverted by Hermite
    interpolation of ln(x - a) - ln(b - x).

    Raises
    ------
    NonAdjacentWells
        If another minimum lies strictly between the two wells.
    QuadratureFailure
        If the accumulated quadrature error exceeds ``tolerance``.
    """
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    locations = [w.location for w in model.wells()]
    for well in (from_well, to_well):
        if well not in locations:
            raise ValueError(f"{well!r} is not a minimum of {model.family.value}")
    if from_well == to_well:
        raise ValueError("an instanton needs two distinct wells")
    a, b = sorted((float(from_well), float(to_well)))
    between = [x for x in locations if a < x < b]
    if between:
        raise NonAdjacentWells(f"minima {between} lie between {a} and {b}")

    mu_a = model.well_at(a).frequency
    mu_b = model.well_at(b).frequency
    mid = default_anchor(model, a, b) if anchor is None else float(anchor)
    if not a < mid < b:
        raise ValueError("anchor must lie strictly between the wells")
    width = b - a

    def remainder(x):
        return 1.0 / model.speed(x) - 1.0 / (mu_a * (x - a)) - 1.0 / (mu_b * (b - x))

    floor = 1e-11 * width
    delta = step / max(mu_a, mu_b)
    n_left = int(np.ceil(np.log((mid - a) / floor) / (mu_a * delta)))
    n_right = int(np.ceil(np.log((b - mid) / floor) / (mu_b * delta)))
    p_nodes = (mid - a) * np.exp(-mu_a * delta * np.arange(n_left, -1, -1))
    q_nodes = (b - mid) * np.exp(-mu_b * delta * np.arange(1, n_right + 1))
    x = np.concatenate([a + p_nodes, b - q_nodes])
    x[n_left] = mid
    x = np.unique(x)
    x = x[(x > a) & (x < b)]
    i_mid = int(np.searchsorted(x, mid))
    p = x - a
    q = b - x

    pieces, total_err = _interval_integrals(remainder, x, tolerance)
    cumulative = np.zeros_like(x)
    cumulative[i_mid + 1:] = np.cumsum(pieces[i_mid:])
    cumulative[:i_mid] = -np.cumsum(pieces[:i_mid][::-1])[::-1]
    if total_err > tolerance:
        raise QuadratureFailure(f"accumulated quadrature error {total_err:.3e} exceeds {tolerance:.3e}")

    s = np.log(p / (mid - a)) / mu_a - np.log(q / (b - mid)) / mu_b + cumulative
    if np.any(np.diff(s) <= 0):
        raise QuadratureFailure("tabulated tau(x) is not strictly increasing")
    y = np.log(p) - np.log(q)
    dy = width * model.speed(x) / (p * q)
    shape = _TabulatedShape(model, a, b, s, y, dy, x)

    action, _ = _quad(model.speed, a, b, tolerance)
    profile = InstantonProfile(
        endpoints=(a, b),
        center=float(tau_c),
        action=action,
        decay_rates=(mu_a, mu_b),
        amplitude_constants=(np.nan, np.nan),
        model=model,
        kind="numeric",
        _shape=shape,
    )
    profile = replace(profile, amplitude_constants=_tail_constants(profile))
    if from_well > to_well:
        profile = time_reverse(profile)
    return profile


class Transform(str, Enum):
    TIME_REVERSE = "time_reverse"
    SPACE_REFLECT = "space_reflect"
    TRANSLATE = "translate"


def time_reverse(profile: InstantonProfile) -> InstantonProfile:
    """tau -> -tau about the center: instanton <-> anti-instanton."""
    return replace(
        profile,
        endpoints=profile.endpoints[::-1],
        decay_rates=profile.decay_rates[::-1],
        amplitude_constants=profile.amplitude_constants[::-1],
        time_sign=-profile.time_sign,
    )


def space_reflect(profile: InstantonProfile) -> InstantonProfile:
    """x -> -x, mapping the 0 -> 1 solution onto 0 -> -1."""
    return replace(
        profile,
        endpoints=(-profile.endpoints[0], -profile.endpoints[1]),
        space_sign=-profile.space_sign,
    )


def translate(profile: InstantonProfile, shift: float) -> InstantonProfile:
    return replace(profile, center=profile.center + shift)


def transform(profile: InstantonProfile, op: Transform | str, shift: float = 0.0) -> InstantonProfile:
    op = Transform(op)
    if op is Transform.TIME_REVERSE:
        return time_reverse(profile)
    if op is Transform.SPACE_REFLECT:
        return space_reflect(profile)
    return translate(profile, shift)


def action_tau_integral(profile: InstantonProfile) -> float:
    """S = int (dx_c/dtau)^2 dtau, independent of the x-space value stored on the profile."""
    span = 60.0 * profile.scale
    c = profile.center
    pieces = [c - span, c - 10.0 * profile.scale, c, c + 10.0 * profile.scale, c + span]
    total = 0.0
    for lo, hi in zip(pieces[:-1], pieces[1:]):
        val, _ = integrate.quad(lambda t: float(profile.velocity(t)) ** 2, lo, hi,
                                epsabs=0.0, epsrel=1e-13, limit=500)
        total += val
    return total


def bogomolnyi_residual(profile: InstantonProfile, taus) -> float:
    """max |dx_c/dtau - sign * sqrt(2V(x_c))| / max |dx_c/dtau| on ``taus``."""
    v = profile.velocity(taus)
    sign = profile.space_sign * profile.time_sign
    target = sign * profile.model.speed(profile(taus))
    return float(np.max(np.abs(v - target)) / np.max(np.abs(v)))


@dataclass(frozen=True)
class ZeroMode:
    values: object
    derivative: object
    norm_check: float
    residual: float


def zero_mode(profile: InstantonProfile, residual_step: float = 1e-3) -> ZeroMode:
    """Normalized translation mode x_o = (dx_c/dtau) / sqrt(S).

    ``residual`` is max |-x_o'' + W x_o| from second differences with step
    ``residual_step`` over |tau - center| <= 10 / min(mu).
    """
    if profile.action <= 0:
        raise ValueError("profile action must be positive")
    norm = 1.0 / np.sqrt(profile.action)

    def values(tau):
        return norm * profile.velocity(tau)

    def derivative(tau):
        # d^2 x_c / dtau^2 = V'(x_c) for either orientation
        return norm * profile.model.first_derivative(profile(tau))

    c, scale = profile.center, profile.scale
    norm_check = 0.0
    for lo, hi in [(c - 60 * scale, c - 10 * scale), (c - 10 * scale, c),
                   (c, c + 10 * scale), (c + 10 * scale, c + 60 * scale)]:
        val, _ = integrate.quad(lambda t: float(values(t)) ** 2, lo, hi,
                                epsabs=0.0, epsrel=1e-13, limit=500)
        norm_check += val

    h = residual_step
    taus = c + np.arange(-10 * scale, 10 * scale + 0.5 * h, h)
    xo = values(taus)
    second = (xo[2:] - 2.0 * xo[1:-1] + xo[:-2]) / (h * h)
    residual = float(np.max(np.abs(-second + profile.curvature(taus[1:-1]) * xo[1:-1])))
    return ZeroMode(values=values, derivative=derivative, norm_check=norm_check, residual=residual)


def _fit_constants(profile: InstantonProfile) -> tuple[float, float]:
    mu_minus, mu_plus = profile.decay_rates
    lo, hi = FIT_WINDOW
    offsets = np.linspace(lo, hi, 64) * profile.scale
    norm = 1.0 / np.sqrt(profile.action)
    c = profile.center
    left = norm * np.abs(profile.velocity(c - offsets)) * np.exp(mu_minus * offsets)
    right = norm * np.abs(profile.velocity(c + offsets)) * np.exp(mu_plus * offsets)
    for name, plateau in (("left", left), ("right", right)):
        spread = (plateau.max() - plateau.min()) / plateau.mean()
        if not spread <= FIT_RTOL:
            raise FitUnstable(f"{name} plateau varies by {spread:.3e} across the fit window")
    # the outermost sample is closest to the limit
    return float(left[-1]), float(right[-1])


def _tail_constants(profile: InstantonProfile) -> tuple[float, float]:
    # deep in the tails the tabulated profile is an exact exponential
    mu_minus, mu_plus = profile.decay_rates
    offset = 40.0 * profile.scale
    norm = 1.0 / np.sqrt(profile.action)
    c = profile.center
    left = norm * abs(float(profile.velocity(c - offset))) * np.exp(mu_minus * offset)
    right = norm * abs(float(profile.velocity(c + offset))) * np.exp(mu_plus * offset)
    return float(left), float(right)


def asymptotic_constants(profile: InstantonProfile, fit: bool | None = None) -> tuple[float, float]:
    """(D, C) of the zero-mode tails.

    Closed-form profiles return the analytic 2*sqrt(omega) unless ``fit``
    is requested; tabulated profiles are always fitted.
    """
    if fit is None:
        fit = profile.kind != "closed_form"
    if not fit:
        return profile.amplitude_constants
    return _fit_constants(profile)
