"""Second-order Dirichlet discretization shared by the eigenvalue routines."""
from __future__ import annotations

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal

from .errors import Nonconvergence


def interior_nodes(lo: float, hi: float, points: int) -> tuple[np.ndarray, float]:
    """Interior nodes of a uniform ``points``-node grid on [lo, hi] and its spacing."""
    grid = np.linspace(lo, hi, points)
    return grid[1:-1], grid[1] - grid[0]


def tridiagonal(potential_values, h: float, kinetic: float = 1.0):
    """Diagonal and off-diagonal of -kinetic * d^2/dx^2 + potential with zero boundary values."""
    values = np.asarray(potential_values, dtype=float)
    diag = 2.0 * kinetic / h ** 2 + values
    off = np.full(values.size - 1, -kinetic / h ** 2)
    return diag, off


def eigenvalues(diag, off, count: int | None = None) -> np.ndarray:
    try:
        if count is None:
            return eigh_tridiagonal(diag, off, eigvals_only=True)
        return eigh_tridiagonal(diag, off, eigvals_only=True, select="i", select_range=(0, count - 1))
    except (LinAlgError, ValueError) as exc:
        raise Nonconvergence(str(exc)) from exc


def eigenpairs(diag, off, count: int):
    try:
        return eigh_tridiagonal(diag, off, select="i", select_range=(0, count - 1))
    except (LinAlgError, ValueError) as exc:
        raise Nonconvergence(str(exc)) from exc


def richardson(coarse: float, fine: float, ratio: float = 2.0, order: int = 2):
    """Extrapolate a quantity with error c*h^order from spacings h and h/ratio."""
    factor = ratio ** order
    return (factor * fine - coarse) / (factor - 1.0)


def refined_points(points: int) -> int:
    """Node count whose spacing is exactly half that of ``points`` nodes."""
    return 2 * points - 1
