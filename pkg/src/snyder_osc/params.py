"""Model parameters shared by the classical and quantum code.

Units: hbar = 1 everywhere. The classical equations of motion use m = 1;
``mass`` is kept on the parameter object for the quantum Hamiltonians.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import NegativeL, NonPositiveMass, NonPositiveOmega


class Regime(enum.Enum):
    OSCILLATORY = "Oscillatory"
    CUTOFF = "Cutoff"


@dataclass(frozen=True)
class SnyderParams:
    """Deformation length ``l``, angular frequency ``omega`` and ``mass``.

    Construction validates the values, so every instance in circulation is
    usable. Use :func:`validate` when the error should name the offending field
    coming from untrusted input (it raises the same exceptions).
    """

    l: float
    omega: float
    mass: float = 1.0

    def __post_init__(self):
        for name in ("l", "omega", "mass"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise TypeError(f"{name} must be a real number, got {value!r}")
            object.__setattr__(self, name, float(value))
        if not math.isfinite(self.omega) or self.omega <= 0.0:
            raise NonPositiveOmega(f"omega must be finite and > 0, got {self.omega!r}")
        if not math.isfinite(self.mass) or self.mass <= 0.0:
            raise NonPositiveMass(f"mass must be finite and > 0, got {self.mass!r}")
        if not math.isfinite(self.l) or self.l < 0.0:
            raise NegativeL(f"l must be finite and >= 0, got {self.l!r}")

    @property
    def l_omega(self) -> float:
        return self.l * self.omega

    @property
    def deformation(self) -> float:
        """The combination l**2 * omega**2 that controls the classical motion."""
        return (self.l * self.omega) ** 2

    @property
    def regime(self) -> Regime:
        return classify_regime(self)


def validate(l: float, omega: float, mass: float = 1.0) -> SnyderParams:
    """Return validated parameters or raise a field-specific :class:`ConfigError`."""
    return SnyderParams(l=l, omega=omega, mass=mass)


def classify_regime(params: SnyderParams) -> Regime:
    # l*omega == 1 is Cutoff: the closed-form frequency sqrt(1 - l^2 omega^2) vanishes.
    if params.l * params.omega < 1.0:
        return Regime.OSCILLATORY
    return Regime.CUTOFF
