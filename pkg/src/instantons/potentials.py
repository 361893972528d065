"""
Symmetric one-dimensional potentials with closed-form derivatives.

The triple well is normalized as

    V(x) = (omega^2 / 2) x^2 (x^2 - 1)^2

so that the central minimum has frequency omega, the lateral ones 2*omega,
the 0 -> 1 instanton is sqrt((1 + tanh(omega tau)) / 2) and its action is
omega / 4.  Mass is fixed to one.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

NORMALIZATIONS = {
    "triple_well": "V(x) = (omega^2/2) x^2 (x^2-1)^2",
    "double_well": "V(x) = (omega^2/8) (x^2-1)^2",
    "harmonic": "V(x) = (omega^2/2) x^2",
}


class Family(str, Enum):
    TRIPLE_WELL = "triple_well"
    DOUBLE_WELL = "double_well"
    HARMONIC = "harmonic"


class Equivalence(str, Enum):
    CENTRAL = "central"
    LATERAL = "lateral"


@dataclass(frozen=True)
class WellInfo:
    location: float
    frequency: float
    equivalence_class: Equivalence


@dataclass(frozen=True)
class PotentialModel:
    """A member of one of the potential families.

    ``omega`` is the frequency parameter of the triple and double wells and
    the oscillator frequency for ``Family.HARMONIC``.
    """

    family: Family
    omega: float

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if not np.isfinite(self.omega) or self.omega <= 0:
            raise ValueError(f"omega must be positive, got {self.omega!r}")

    @classmethod
    def triple_well(cls, omega: float) -> "PotentialModel":
        return cls(Family.TRIPLE_WELL, omega)

    @classmethod
    def double_well(cls, omega: float) -> "PotentialModel":
        return cls(Family.DOUBLE_WELL, omega)

    @classmethod
    def harmonic(cls, nu: float) -> "PotentialModel":
        return cls(Family.HARMONIC, nu)

    @property
    def normalization(self) -> str:
        return NORMALIZATIONS[self.family.value]

    def __call__(self, x):
        return self.value(x)

    def value(self, x):
        x = np.asarray(x, dtype=float)
        w2 = self.omega ** 2
        x2 = x * x
        if self.family is Family.TRIPLE_WELL:
            return 0.5 * w2 * x2 * (x2 - 1.0) ** 2
        if self.family is Family.DOUBLE_WELL:
            return 0.125 * w2 * (x2 - 1.0) ** 2
        return 0.5 * w2 * x2

    def first_derivative(self, x):
        x = np.asarray(x, dtype=float)
        w2 = self.omega ** 2
        if self.family is Family.TRIPLE_WELL:
            return w2 * x * ((x - 1.0) * (x + 1.0)) * (3.0 * x * x - 1.0)
        if self.family is Family.DOUBLE_WELL:
            return 0.5 * w2 * x * ((x - 1.0) * (x + 1.0))
        return w2 * x

    def second_derivative(self, x):
        x = np.asarray(x, dtype=float)
        w2 = self.omega ** 2
        x2 = x * x
        if self.family is Family.TRIPLE_WELL:
            return 0.5 * w2 * (30.0 * x2 * x2 - 24.0 * x2 + 2.0)
        if self.family is Family.DOUBLE_WELL:
            return 0.5 * w2 * (3.0 * x2 - 1.0)
        return w2 * np.ones_like(x)

    def speed(self, x):
        """sqrt(2 V(x)), evaluated in factored form.

        The factors (x - 1) and (x + 1) are exact near the wells, so the
        result keeps full relative accuracy as x approaches a minimum.
        """
        x = np.asarray(x, dtype=float)
        w = self.omega
        if self.family is Family.TRIPLE_WELL:
            return w * np.abs(x) * (np.abs(x - 1.0) * np.abs(x + 1.0))
        if self.family is Family.DOUBLE_WELL:
            return 0.5 * w * (np.abs(x - 1.0) * np.abs(x + 1.0))
        return w * np.abs(x)

    def wells(self) -> list[WellInfo]:
        w = self.omega
        if self.family is Family.TRIPLE_WELL:
            return [
                WellInfo(-1.0, 2.0 * w, Equivalence.LATERAL),
                WellInfo(0.0, w, Equivalence.CENTRAL),
                WellInfo(1.0, 2.0 * w, Equivalence.LATERAL),
            ]
        if self.family is Family.DOUBLE_WELL:
            return [
                WellInfo(-1.0, w, Equivalence.LATERAL),
                WellInfo(1.0, w, Equivalence.LATERAL),
            ]
        return [WellInfo(0.0, w, Equivalence.CENTRAL)]

    def well_at(self, location: float) -> WellInfo:
        for well in self.wells():
            if well.location == location:
                return well
        raise ValueError(f"{location!r} is not a minimum of {self.family.value}")

    def averaged_frequency(self) -> float:
        """Mean of the central and lateral well frequencies (3*omega/2 for the triple well)."""
        by_class = {}
        for well in self.wells():
            by_class.setdefault(well.equivalence_class, well.frequency)
        return float(np.mean(list(by_class.values())))


def evaluate(model: PotentialModel, x):
    return model.value(x)


def second_derivative(model: PotentialModel, x):
    return model.second_derivative(x)


def wells(model: PotentialModel) -> list[WellInfo]:
    return model.wells()
