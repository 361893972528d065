"""
Quadratic fluctuations around an instanton.

Determinant ratios come from the Gelfand-Yaglom initial value problem
-f'' + W f = 0, f(-T/2) = 0, f'(-T/2) = 1, whose terminal value f(T/2)
equals the determinant up to a W-independent constant.  The solution
grows like exp(mu T), so it is carried as a binary mantissa/exponent pair.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np
from scipy import integrate

from . import _grid
from .errors import OverflowUnrepresentable, QuadratureFailure, ResolutionWarning, ToleranceNotMet
from .instanton import InstantonProfile, ZeroMode, closed_form_instanton

LN2 = math.log(2.0)
GY_RTOL = 1e-13
# absolute tolerance for a state rescaled to unit size
GY_ATOL = 1e-30
SEGMENT_GROWTH = 20.0


@dataclass(frozen=True)
class LogScaled:
    """A real number stored as mantissa * 2**exponent."""

    mantissa: float
    exponent: int = 0

    @classmethod
    def from_float(cls, value: float) -> "LogScaled":
        m, e = math.frexp(value)
        return cls(m, e)

    @classmethod
    def from_log(cls, log_value: float, sign: float = 1.0) -> "LogScaled":
        if log_value == -math.inf:
            return cls(0.0, 0)
        e = math.floor(log_value / LN2)
        return cls(math.copysign(math.exp(log_value - e * LN2), sign), e)

    @property
    def log(self) -> float:
        """Natural log of the absolute value."""
        if self.mantissa == 0.0:
            return -math.inf
        return math.log(abs(self.mantissa)) + self.exponent * LN2

    @property
    def value(self) -> float:
        try:
            return math.ldexp(self.mantissa, self.exponent)
        except OverflowError as exc:
            raise OverflowUnrepresentable(f"2^{self.exponent} exceeds the float range") from exc

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class StabilityOperator:
    """-d^2/dtau^2 + W(tau) on [-T/2, T/2] with Dirichlet ends."""

    curvature: object
    T: float
    asymptotic_curvatures: tuple[float, float]

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError("T must be positive")

    @property
    def interval(self) -> tuple[float, float]:
        return -0.5 * self.T, 0.5 * self.T

    @classmethod
    def around(cls, profile: InstantonProfile, T: float) -> "StabilityOperator":
        return cls(profile.curvature, T, profile.asymptotic_curvatures)

    @classmethod
    def constant(cls, nu: float, T: float) -> "StabilityOperator":
        w = nu * nu
        return cls(lambda tau: np.full(np.shape(tau), w), T, (w, w))


def gy_terminal(op: StabilityOperator, rescale: bool = True, rtol: float = GY_RTOL) -> LogScaled:
    """f(T/2) for -f'' + W f = 0 with f(-T/2) = 0, f'(-T/2) = 1.

    The interval is cut into segments across which the solution grows by
    at most about exp(20); after each one the state is divided by a power
    of two.  Power-of-two scaling is exact and the tolerances scale with
    it, so ``rescale=False`` produces bit-identical results as long as the
    plain value stays in range.
    """
    lo, hi = op.interval
    probe = np.asarray(op.curvature(np.linspace(lo, hi, 2001)), dtype=float)
    rate = math.sqrt(max(float(probe.max()), 0.0))
    n_seg = max(1, math.ceil(op.T * rate / SEGMENT_GROWTH))
    edges = np.linspace(lo, hi, n_seg + 1)

    def rhs(tau, y):
        return [y[1], float(op.curvature(tau)) * y[0]]

    y = np.array([0.0, 1.0])
    shift = 0
    for t0, t1 in zip(edges[:-1], edges[1:]):
        atol = GY_ATOL if rescale else math.ldexp(GY_ATOL, shift)
        sol = integrate.solve_ivp(rhs, (t0, t1), y, method="DOP853", rtol=rtol, atol=atol)
        if sol.status != 0:
            raise ToleranceNotMet(f"integration over [{t0}, {t1}] failed: {sol.message}")
        y = sol.y[:, -1]
        _, k = math.frexp(float(np.max(np.abs(y))))
        if rescale:
            y = np.ldexp(y, -k)
            shift += k
        else:
            # the unscaled state already carries the accumulated exponent
            shift = k
    if rescale:
        return LogScaled(float(y[0]), shift)
    return LogScaled.from_float(float(y[0]))


def gy_terminal_zero_mode(profile: InstantonProfile, T: float) -> LogScaled:
    """f(T/2) for the operator around ``profile`` via its exact zero mode.

    With the unit-Wronskian partner y_o, the Gelfand-Yaglom solution is
    f = x_o(-T/2) y_o - y_o(-T/2) x_o, so

        f(T/2) = x_o(-T/2) x_o(T/2) int_{-T/2}^{T/2} ds / x_o(s)^2.

    Every term is positive.  The direct initial value integration instead
    has to resolve a component suppressed by exp(-mu T) and loses about
    rtol * exp(mu T) in relative accuracy, so this form is the one used
    for determinant reports.
    """
    if not T > 0:
        raise ValueError("T must be positive")
    half = 0.5 * T
    c = profile.center

    def minus_two_log(s):
        return -2.0 * float(profile.log_abs_velocity(s))

    peak = max(minus_two_log(-half), minus_two_log(half))
    total = 0.0
    for lo, hi in ((-half, c), (c, half)):
        if hi <= lo:
            continue
        val, _ = integrate.quad(lambda s: math.exp(minus_two_log(s) - peak), lo, hi,
                                epsabs=0.0, epsrel=1e-13, limit=500)
        total += val
    if not total > 0:
        raise QuadratureFailure("zero-mode integral vanished")
    # x_o = velocity / sqrt(S); the normalization cancels between the factors
    log_f = (float(profile.log_abs_velocity(-half)) + float(profile.log_abs_velocity(half))
             + peak + math.log(total))
    return LogScaled.from_log(log_f)


def reference_terminal(nu: float, T: float) -> LogScaled:
    """sinh(nu T) / nu, the terminal value for constant W = nu^2."""
    if nu <= 0 or T < 0:
        raise ValueError("nu must be positive and T non-negative")
    x = nu * T
    if x < 700.0:
        return LogScaled.from_float(math.sinh(x) / nu)
    return LogScaled.from_log(x - LN2 + math.log1p(-math.exp(-2.0 * x)) - math.log(nu))


def harmonic_propagator(nu: float, T: float) -> float:
    """<0| exp(-H T) |0> for the oscillator: sqrt(nu/pi) (2 sinh nu T)^(-1/2)."""
    log_sinh = reference_terminal(nu, T).log + math.log(nu)
    return math.exp(0.5 * math.log(nu / math.pi) - 0.5 * (LN2 + log_sinh))


def gy_propagator(op: StabilityOperator) -> float:
    """Return amplitude (2 pi f(T/2))^(-1/2) with f from the Gelfand-Yaglom solution."""
    return math.exp(-0.5 * (math.log(2.0 * math.pi) + gy_terminal(op).log))


class SecondSolution:
    """y_o(tau) = x_o(tau) int_0^tau ds / x_o(s)^2, the partner of the zero mode."""

    def __init__(self, mode: ZeroMode, origin: float = 0.0):
        self.mode = mode
        self.origin = origin

    def _integral(self, tau: float) -> float:
        def inv_sq(s):
            xo = float(self.mode.values(s))
            if xo == 0.0 or not math.isfinite(xo):
                raise QuadratureFailure(f"zero mode underflows at tau={s}")
            return 1.0 / (xo * xo)

        val, _ = integrate.quad(inv_sq, self.origin, tau, epsabs=0.0, epsrel=1e-12, limit=400)
        return val

    def __call__(self, tau):
        taus = np.atleast_1d(np.asarray(tau, dtype=float))
        out = np.array([float(self.mode.values(t)) * self._integral(t) for t in taus])
        return out if np.ndim(tau) else float(out[0])

    def derivative(self, tau):
        taus = np.atleast_1d(np.asarray(tau, dtype=float))
        out = []
        for t in taus:
            xo = float(self.mode.values(t))
            out.append(float(self.mode.derivative(t)) * self._integral(t) + 1.0 / xo)
        out = np.array(out)
        return out if np.ndim(tau) else float(out[0])

    def wronskian(self, tau):
        xo, dxo = self.mode.values(tau), self.mode.derivative(tau)
        return xo * self.derivative(tau) - dxo * self(tau)


def second_solution(mode: ZeroMode, origin: float = 0.0) -> SecondSolution:
    return SecondSolution(mode, origin)


def lowest_eigenvalue_analytic(omega: float, D: float, T: float) -> float:
    """2 omega D^2 exp(-omega T): the near-zero mode lifted by the finite box."""
    if omega <= 0 or D <= 0 or T < 0:
        raise ValueError("omega, D must be positive and T non-negative")
    return 2.0 * omega * D * D * math.exp(-omega * T)


def lowest_eigenvalue_numeric(op: StabilityOperator, grid_points: int = 4000) -> float:
    """Smallest Dirichlet eigenvalue of the finite-difference stability operator.

    The discretization error is estimated against a grid of half the
    spacing; a ``ResolutionWarning`` is issued when the eigenvalue is less
    than ten times that estimate plus the eigensolver round-off floor.
    """
    if grid_points < 1000:
        raise ValueError("grid_points must be at least 1000")
    lo, hi = op.interval

    def solve(points):
        nodes, h = _grid.interior_nodes(lo, hi, points)
        diag, off = _grid.tridiagonal(op.curvature(nodes), h)
        return float(_grid.eigenvalues(diag, off, 1)[0]), float(np.max(np.abs(diag)))

    lam, norm = solve(grid_points)
    lam_fine, _ = solve(_grid.refined_points(grid_points))
    error = 4.0 / 3.0 * abs(lam - lam_fine) + 10.0 * np.finfo(float).eps * 4.0 * norm
    if not lam > 10.0 * error:
        warnings.warn(
            f"lowest eigenvalue {lam:.3e} is below ten times the discretization error {error:.3e}",
            ResolutionWarning,
            stacklevel=2,
        )
    return lam


def collective_jacobian(action: float) -> float:
    """sqrt(S / 2 pi): measure factor from trading the zero mode for the center."""
    if action <= 0:
        raise ValueError("action must be positive")
    return math.sqrt(action / (2.0 * math.pi))


def one_instanton_weight(omega: float) -> float:
    """omega sqrt(S) sqrt(4 / 3 pi): the closed-form per-unit-time factor of one jump."""
    return omega * math.sqrt(omega / 4.0) * math.sqrt(4.0 / (3.0 * math.pi))


def one_instanton_amplitude(omega: float, T: float) -> float:
    """Single-jump 0 -> 1 amplitude per unit center time, averaged-oscillator normalization."""
    nu = 1.5 * omega
    action = omega / 4.0
    log_osc = 0.5 * math.log(nu / math.pi) - 0.5 * (LN2 + reference_terminal(nu, T).log + math.log(nu))
    return math.exp(log_osc - action) * one_instanton_weight(omega)


@dataclass(frozen=True)
class DeterminantReport:
    omega: float
    T: float
    nu: float
    gy_value: float
    reference_value: float
    raw_ratio: float
    lowest_eigenvalue: float
    reduced_ratio: float
    jacobian: float
    log_gy_value: float
    log_reference_value: float
    instanton_weight: float
    closed_form_weight: float
    numeric_lowest_eigenvalue: float | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def determinant_report(
    omega: float,
    T: float,
    nu: float | None = None,
    numeric_grid: int | None = None,
) -> DeterminantReport:
    """Gelfand-Yaglom determinant data for the 0 -> 1 triple-well instanton.

    ``instanton_weight`` is jacobian / sqrt(reduced_ratio), the per-jump
    factor assembled from the computed determinants, and
    ``closed_form_weight`` is the closed-form value it is compared with.
    With ``numeric_grid`` the lowest eigenvalue is also computed by
    diagonalization, as a cross-check only.
    """
    if omega <= 0 or T <= 0:
        raise ValueError("omega and T must be positive")
    if omega * T < 20.0:
        raise ValueError(f"omega*T = {omega * T} is below the asymptotic regime (>= 20)")
    nu = 1.5 * omega if nu is None else float(nu)
    profile = closed_form_instanton(omega)
    op = StabilityOperator.around(profile, T)
    gy = gy_terminal_zero_mode(profile, T)
    ref = reference_terminal(nu, T)
    D, _ = profile.amplitude_constants
    lam = lowest_eigenvalue_analytic(omega, D, T)
    log_raw = gy.log - ref.log
    reduced = math.exp(log_raw - math.log(lam))
    raw = reduced * lam
    jac = collective_jacobian(profile.action)
    numeric = None
    if numeric_grid is not None:
        numeric = lowest_eigenvalue_numeric(op, numeric_grid)
    return DeterminantReport(
        omega=float(omega),
        T=float(T),
        nu=nu,
        gy_value=gy.value,
        reference_value=ref.value,
        raw_ratio=raw,
        lowest_eigenvalue=lam,
        reduced_ratio=reduced,
        jacobian=jac,
        log_gy_value=gy.log,
        log_reference_value=ref.log,
        instanton_weight=jac / math.sqrt(reduced),
        closed_form_weight=one_instanton_weight(omega),
        numeric_lowest_eigenvalue=numeric,
    )


def check_report(data: dict, rtol: float = 1e-12) -> list[str]:
    """Internal identities a determinant report must satisfy; returns failure messages."""
    failures = []
    for key in ("raw_ratio", "lowest_eigenvalue", "reduced_ratio", "jacobian"):
        if not data[key] > 0:
            failures.append(f"{key} is not positive")
    if not math.isclose(data["reduced_ratio"] * data["lowest_eigenvalue"], data["raw_ratio"], rel_tol=rtol):
        failures.append("reduced_ratio * lowest_eigenvalue != raw_ratio")
    if not math.isclose(data["raw_ratio"], math.exp(data["log_gy_value"] - data["log_reference_value"]),
                        rel_tol=1e-10):
        failures.append("raw_ratio disagrees with the logged terminal values")
    action = data["omega"] / 4.0
    if not math.isclose(data["jacobian"], collective_jacobian(action), rel_tol=rtol):
        failures.append("jacobian != sqrt(S / 2 pi)")
    expected_lam = lowest_eigenvalue_analytic(data["omega"], 2.0 * math.sqrt(data["omega"]), data["T"])
    if not math.isclose(data["lowest_eigenvalue"], expected_lam, rel_tol=rtol):
        failures.append("lowest_eigenvalue != 2 omega D^2 exp(-omega T)")
    return failures
