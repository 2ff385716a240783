"""
Leyes de Darcy efectivas: V' según el régimen seleccionado por (r, γ).
"""

import logging
from dataclasses import dataclass
from typing import Union

import numpy as np

from cell_mesh.geometry import CellSpec
from core.conf import get_setting
from core.exceptions import ConfigError
from fem_stokes.picard import PicardOptions
from rheology.laws import Carreau, PowerLaw
from rheology.regimes import DarcyRegime, EffectiveLawKind, on_boundary, power_prefactor, regime_select
from .permeability import PermeabilityOperator, PermeabilityTensor, permeability_tensor

logger = logging.getLogger(__name__)

LawData = Union[PermeabilityTensor, PermeabilityOperator]


def darcy_velocity(lawkind: EffectiveLawKind, f_minus_gradp, data: LawData) -> np.ndarray:
    """V = (V₁, V₂, 0) para ξ' = f' − ∇P̃."""
    xi = np.asarray(f_minus_gradp, dtype=float).reshape(2)
    if lawkind.regime == DarcyRegime.LINEAR:
        if not isinstance(data, PermeabilityTensor):
            raise ConfigError("La ley lineal requiere un PermeabilityTensor")
        plano = data.apply(xi) / lawkind.eta
    elif lawkind.regime == DarcyRegime.CARREAU:
        if not isinstance(data, PermeabilityOperator):
            raise ConfigError("La ley tipo Carreau requiere un PermeabilityOperator")
        plano = data(xi).U
    elif lawkind.regime == DarcyRegime.POWER:
        if not isinstance(data, PermeabilityOperator):
            raise ConfigError("La ley tipo potencia requiere un PermeabilityOperator")
        plano = lawkind.prefactor * data(xi).U
    else:
        raise ConfigError(f"Régimen desconocido: {lawkind.regime}")
    return np.append(plano, 0.0)


@dataclass(eq=False)
class EffectiveLaw:
    kind: EffectiveLawKind
    data: LawData
    eta_0: float
    eta_inf: float
    lam: float

    @property
    def r(self) -> float:
        return self.kind.r

    @property
    def gamma(self) -> float:
        return self.kind.gamma

    def velocity(self, f_minus_gradp) -> np.ndarray:
        return darcy_velocity(self.kind, f_minus_gradp, self.data)

    def sample(self, f_minus_gradp):
        """Velocidad y diagnóstico del solve de celda (None en el régimen lineal)."""
        xi = np.asarray(f_minus_gradp, dtype=float).reshape(2)
        if self.kind.regime == DarcyRegime.LINEAR:
            return self.velocity(xi), None
        muestra = self.data(xi)
        escala = self.kind.prefactor if self.kind.regime == DarcyRegime.POWER else 1.0
        return np.append(escala * muestra.U, 0.0), muestra

    @classmethod
    def build(cls, cell: CellSpec, r: float, gamma: float, eta_0: float = None, eta_inf: float = None,
              lam: float = None, delta_reg: float = None, opts: PicardOptions = None,
              tol: float = None, family: bool = False) -> 'EffectiveLaw':
        """Ley efectiva del régimen que ``regime_select`` asigna a (r, γ).

        Con ``family=True`` el miembro r = 2 de una familia γ = 1 (o γ > 1) se
        resuelve con el problema de celda Carreau (o potencia) de exponente 2,
        de modo que todas las curvas de un barrido usan la misma formulación.
        """
        eta_0 = float(get_setting('ETA_0')) if eta_0 is None else float(eta_0)
        eta_inf = float(get_setting('ETA_INF')) if eta_inf is None else float(eta_inf)
        lam = float(get_setting('LAMBDA')) if lam is None else float(lam)
        kind = regime_select(r, gamma, eta_0=eta_0, eta_inf=eta_inf, lam=lam)
        critico = on_boundary(gamma, 1.0)
        if family and kind.regime == DarcyRegime.LINEAR and kind.viscosity_symbol == 'eta_0' and (gamma > 1.0 or critico):
            if critico:
                kind = EffectiveLawKind(DarcyRegime.CARREAU, r, gamma)
            else:
                kind = EffectiveLawKind(DarcyRegime.POWER, r, gamma,
                                        prefactor=power_prefactor(r, eta_0, eta_inf, lam))
        if kind.regime == DarcyRegime.LINEAR:
            data = permeability_tensor(cell, tol=tol)
        elif kind.regime == DarcyRegime.CARREAU:
            data = PermeabilityOperator(cell, Carreau(eta_0, eta_inf, lam, r), opts, tol=tol)
        else:
            # El problema de celda tipo potencia usa μ = 1; las constantes van en el prefactor.
            data = PermeabilityOperator(cell, PowerLaw(1.0, r, delta_reg), opts, tol=tol)
        logger.info(f"Ley efectiva para r={r}, γ={gamma}: {kind.label}")
        return cls(kind=kind, data=data, eta_0=eta_0, eta_inf=eta_inf, lam=lam)


def form_factor_report(cell: CellSpec, eta_0: float = None, xi=(1.0, 0.0), opts: PicardOptions = None) -> dict:
    """Compara (1/η₀)𝒜ξ (forma −Δ) con 𝒰(ξ) de Carreau con r = 2 (forma −div(η₀𝔻)).

    Para campos de divergencia nula div 𝔻[u] = ½Δu, así que el cociente
    esperado es 2 en cualquier celda.
    """
    eta_0 = float(get_setting('ETA_0')) if eta_0 is None else float(eta_0)
    xi = np.asarray(xi, dtype=float).reshape(2)
    tensor = permeability_tensor(cell)
    lineal = tensor.apply(xi) / eta_0
    eta_inf = min(float(get_setting('ETA_INF')), 0.5 * eta_0)
    operador = PermeabilityOperator(cell, Carreau(eta_0, eta_inf, float(get_setting('LAMBDA')), 2.0), opts)
    carreau = operador(xi).U
    cociente = float(np.linalg.norm(carreau) / np.linalg.norm(lineal))
    reporte = {
        'xi': xi.tolist(),
        'eta_0': eta_0,
        'laplacian_form': lineal.tolist(),
        'symmetric_form': carreau.tolist(),
        'ratio': cociente,
        'A': tensor.as_dict(),
    }
    logger.info(f"Factor de forma: |𝒰|/|(1/η₀)𝒜ξ| = {cociente:.6f}")
    return reporte
