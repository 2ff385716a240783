"""
Selección de la ley de Darcy efectiva según (r, γ).

La tabla de regímenes es total: γ<1 siempre lineal con η₀; γ=1 lineal
con η₀ sólo si r=2, si no tipo Carreau; γ>1 lineal con η∞ (1<r<2),
lineal con η₀ (r=2) o tipo potencia (r>2).
"""

import math
from dataclasses import dataclass
from typing import Optional

from django.db import models

from core.conf import get_setting
from core.exceptions import InvalidLaw
from .laws import conjugate_exponent

# Tolerancia para decidir r = 2 y γ = 1 con flotantes leídos de JSON.
_TOL_FRONTERA = 1e-12


class DarcyRegime(models.TextChoices):
    LINEAR = 'LINEAR_DARCY', "Linear 2D Darcy's law"
    CARREAU = 'CARREAU_DARCY', "Non-linear 2D Darcy's law (Carreau type)"
    POWER = 'POWER_DARCY', "Non-linear 2D Darcy's law (power law type)"


VISCOSITY_LABELS = {'eta_0': 'η0', 'eta_inf': 'η∞'}


@dataclass(frozen=True)
class EffectiveLawKind:
    regime: str
    r: float
    gamma: float
    viscosity_symbol: Optional[str] = None
    eta: Optional[float] = None
    prefactor: Optional[float] = None

    @property
    def r_prime(self) -> float:
        return conjugate_exponent(self.r)

    @property
    def label(self) -> str:
        """Texto de la celda correspondiente en la tabla de regímenes."""
        if self.regime == DarcyRegime.LINEAR:
            return f"{DarcyRegime.LINEAR.label} (viscosity {VISCOSITY_LABELS[self.viscosity_symbol]})"
        return DarcyRegime(self.regime).label

    def as_dict(self) -> dict:
        return {
            'regime': str(self.regime),
            'label': self.label,
            'r': self.r,
            'gamma': self.gamma,
            'viscosity_symbol': self.viscosity_symbol,
            'eta': self.eta,
            'prefactor': self.prefactor,
        }


def power_prefactor(r: float, eta_0: float, eta_inf: float, lam: float) -> float:
    """Prefactor 1/(λ^((2−r')/2)·(η₀−η∞)^(r'−1)) de la ley de Darcy tipo potencia."""
    rp = conjugate_exponent(r)
    return 1.0 / (lam ** ((2.0 - rp) / 2.0) * (eta_0 - eta_inf) ** (rp - 1.0))


def on_boundary(valor: float, referencia: float) -> bool:
    """Igualdad con la tolerancia de las fronteras entre regímenes."""
    return math.isclose(valor, referencia, rel_tol=0.0, abs_tol=_TOL_FRONTERA)


def regime_select(r: float, gamma: float, eta_0: float = None, eta_inf: float = None,
                  lam: float = None) -> EffectiveLawKind:
    """Clasifica el régimen efectivo; los parámetros reológicos sólo fijan η y el prefactor."""
    if not r > 1:
        raise InvalidLaw(f"El régimen requiere r > 1 (r={r})", r=r)
    eta_0 = float(get_setting('ETA_0')) if eta_0 is None else float(eta_0)
    eta_inf = float(get_setting('ETA_INF')) if eta_inf is None else float(eta_inf)
    lam = float(get_setting('LAMBDA')) if lam is None else float(lam)

    def lineal(simbolo):
        eta = eta_0 if simbolo == 'eta_0' else eta_inf
        return EffectiveLawKind(DarcyRegime.LINEAR, r, gamma, viscosity_symbol=simbolo, eta=eta)

    newtoniano = on_boundary(r, 2.0)
    if newtoniano:
        return lineal('eta_0')
    if on_boundary(gamma, 1.0):
        return EffectiveLawKind(DarcyRegime.CARREAU, r, gamma)
    if gamma < 1.0:
        return lineal('eta_0')
    # γ > 1
    if r < 2.0:
        return lineal('eta_inf')
    return EffectiveLawKind(
        DarcyRegime.POWER, r, gamma,
        prefactor=power_prefactor(r, eta_0, eta_inf, lam),
    )


# Representantes de cada fila/columna de la tabla de regímenes.
TABLE_R = (1.7, 2.0, 2.3)
TABLE_GAMMA = (0.5, 1.0, 2.0)


def regime_table(r_list=TABLE_R, gamma_list=TABLE_GAMMA, **parametros) -> list:
    """Filas {gamma, r, regime, label} para cada combinación pedida."""
    filas = []
    for gamma in gamma_list:
        for r in r_list:
            tipo = regime_select(r, gamma, **parametros)
            filas.append({'gamma': gamma, 'r': r, 'regime': str(tipo.regime), 'label': tipo.label})
    return filas
