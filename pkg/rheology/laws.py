"""
Leyes constitutivas de viscosidad.

Todas las leyes se evalúan sobre d = |D|, la norma de Frobenius del
gradiente simetrizado (|ξ|² = Tr(ξξᵗ)). Con esta convención el canal
plano cumple |D|² = (w')²/2.

El esfuerzo del problema de celda es η(D)·D, sin el factor 2 clásico de
σ = −pI + 2ηD.
"""

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from core.conf import get_setting
from core.exceptions import InvalidLaw


@dataclass(frozen=True)
class Newtonian:
    eta: float

    def __post_init__(self):
        if not (self.eta > 0 and math.isfinite(self.eta)):
            raise InvalidLaw(f"Viscosidad newtoniana inválida: {self.eta}", eta=self.eta)

    @property
    def kind(self) -> str:
        return 'NEWTONIAN'

    def evaluate(self, d):
        return np.full_like(np.asarray(d, dtype=float), self.eta)


@dataclass(frozen=True)
class Carreau:
    """Ley de Carreau: (η₀−η∞)(1+λd²)^(r/2−1) + η∞."""

    eta_0: float
    eta_inf: float
    lam: float
    r: float

    def __post_init__(self):
        if not (self.eta_0 > self.eta_inf > 0):
            raise InvalidLaw(
                f"Carreau requiere eta_0 > eta_inf > 0 (eta_0={self.eta_0}, eta_inf={self.eta_inf})",
                eta_0=self.eta_0, eta_inf=self.eta_inf,
            )
        if not self.lam > 0:
            raise InvalidLaw(f"Carreau requiere lambda > 0 (lambda={self.lam})", lam=self.lam)
        if not (1 < self.r < math.inf):
            raise InvalidLaw(f"Carreau requiere 1 < r < inf (r={self.r})", r=self.r)

    @property
    def kind(self) -> str:
        return 'CARREAU'

    def evaluate(self, d):
        d = np.asarray(d, dtype=float)
        return (self.eta_0 - self.eta_inf) * (1.0 + self.lam * d * d) ** (self.r / 2.0 - 1.0) + self.eta_inf


@dataclass(frozen=True)
class PowerLaw:
    """Ley de potencia regularizada: μ(δ²+d²)^((r−2)/2)."""

    mu: float
    r: float
    delta_reg: float = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.delta_reg is None:
            object.__setattr__(self, 'delta_reg', float(get_setting('DELTA_REG')))
        if not self.mu > 0:
            raise InvalidLaw(f"Ley de potencia requiere mu > 0 (mu={self.mu})", mu=self.mu)
        if not self.r > 1:
            raise InvalidLaw(f"Ley de potencia requiere r > 1 (r={self.r})", r=self.r)
        if self.delta_reg < 0:
            raise InvalidLaw(f"delta_reg debe ser >= 0 (delta_reg={self.delta_reg})", delta_reg=self.delta_reg)

    @property
    def kind(self) -> str:
        return 'POWER_LAW'

    @property
    def degenerate(self) -> bool:
        """Sin regularización la viscosidad se anula (r>2) o explota (r<2) en d=0."""
        return self.delta_reg == 0 and self.r != 2

    def evaluate(self, d):
        d = np.asarray(d, dtype=float)
        with np.errstate(divide='ignore'):
            return self.mu * (self.delta_reg ** 2 + d * d) ** ((self.r - 2.0) / 2.0)


ViscosityLaw = Union[Newtonian, Carreau, PowerLaw]


def viscosity(law: ViscosityLaw, d):
    """Viscosidad de ``law`` en d = |D| ≥ 0 (escalar o arreglo)."""
    valor = law.evaluate(d)
    if np.ndim(valor) == 0:
        return float(valor)
    return valor


def stress(law: ViscosityLaw, s):
    """Esfuerzo cortante del canal, viscosity(law, s/√2)·s, con valor 0 en s = 0."""
    s = np.asarray(s, dtype=float)
    with np.errstate(invalid='ignore'):
        valor = law.evaluate(s / math.sqrt(2.0)) * s
    valor = np.where(s == 0.0, 0.0, valor)
    if np.ndim(valor) == 0:
        return float(valor)
    return valor


def conjugate_exponent(r: float) -> float:
    """Exponente conjugado r' = r/(r−1)."""
    if not r > 1:
        raise InvalidLaw(f"El exponente conjugado requiere r > 1 (r={r})", r=r)
    return r / (r - 1.0)
