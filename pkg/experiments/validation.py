"""
Suite de validación: comparaciones con el oráculo de canal y propiedades del
tensor y de las leyes efectivas. Cualquier fallo termina con código 4.
"""

import dataclasses
import itertools
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Callable, List

import numpy as np

from cell_mesh.geometry import PRESETS, CellSpec
from channel_oracle.oracle import (
    channel_flux, channel_flux_closed_power, channel_flux_newtonian, closed_form_check, relative_error,
)
from core.exceptions import HomogenizationError, ValidationFailure
from homogenize.effective import EffectiveLaw
from homogenize.permeability import PermeabilityOperator, permeability_operator, permeability_tensor
from rheology.laws import Carreau, Newtonian, PowerLaw, conjugate_exponent, stress, viscosity
from rheology.regimes import TABLE_GAMMA, TABLE_R, regime_table
from .config import RunConfig

logger = logging.getLogger(__name__)

# Prefactor de referencia para r = 2.3, η₀ = 1, η∞ = 10⁻³, λ = 1.
POWER_PREFACTOR_REFERENCE = 1.00077
FAULT_FACTOR = 1.05

REGIME_TABLE_REFERENCE = {
    (0.5, 1.7): "Linear 2D Darcy's law (viscosity η0)",
    (0.5, 2.0): "Linear 2D Darcy's law (viscosity η0)",
    (0.5, 2.3): "Linear 2D Darcy's law (viscosity η0)",
    (1.0, 1.7): "Non-linear 2D Darcy's law (Carreau type)",
    (1.0, 2.0): "Linear 2D Darcy's law (viscosity η0)",
    (1.0, 2.3): "Non-linear 2D Darcy's law (Carreau type)",
    (2.0, 1.7): "Linear 2D Darcy's law (viscosity η∞)",
    (2.0, 2.0): "Linear 2D Darcy's law (viscosity η0)",
    (2.0, 2.3): "Non-linear 2D Darcy's law (power law type)",
}


@dataclass
class ValidationCheck:
    name: str
    passed: bool
    value: float = None
    tolerance: float = None
    detail: str = ''

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass
class ValidationReport:
    checks: List[ValidationCheck] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> List[ValidationCheck]:
        return [c for c in self.checks if not c.passed]

    def as_dict(self) -> dict:
        return {
            'passed': self.passed,
            'n_checks': len(self.checks),
            'n_failed': len(self.failures),
            'elapsed': self.elapsed,
            'checks': [c.as_dict() for c in self.checks],
        }

    def raise_for_failures(self):
        if not self.passed:
            nombres = ', '.join(c.name for c in self.failures)
            raise ValidationFailure(f"Fallaron {len(self.failures)} verificaciones: {nombres}",
                                    failures=[c.as_dict() for c in self.failures])


def _within(name: str, errores, tolerancia: float, detalle: str = '') -> ValidationCheck:
    peor = float(max(errores))
    return ValidationCheck(name, peor <= tolerancia, value=peor, tolerance=tolerancia, detail=detalle)


def check_closed_form(config: RunConfig) -> ValidationCheck:
    filas = closed_form_check()
    return _within('oracle_power_closed_form', [f['rel_error'] for f in filas], 1e-8)


def check_newtonian_channel(config: RunConfig) -> ValidationCheck:
    errores = [relative_error(channel_flux(Newtonian(eta), xi), channel_flux_newtonian(eta, xi))
               for eta in (config.law.eta_0, config.law.eta_inf) for xi in (0.1, 1.0)]
    return _within('oracle_newtonian_exact', errores, 1e-12)


def check_regularization(config: RunConfig) -> ValidationCheck:
    errores = []
    for r in (1.7, 2.3, 2.6):
        grueso = channel_flux(PowerLaw(1.0, r, 1e-4), 1.0)
        fino = channel_flux(PowerLaw(1.0, r, 1e-8), 1.0)
        errores.append(relative_error(grueso, fino))
    return _within('regularization_sensitivity', errores, 5e-3, 'δ_reg = 10⁻⁴ frente a 10⁻⁸')


def check_regime_table(config: RunConfig) -> ValidationCheck:
    filas = regime_table(TABLE_R, TABLE_GAMMA)
    distintas = [f for f in filas if REGIME_TABLE_REFERENCE[(f['gamma'], f['r'])] != f['label']]
    return ValidationCheck('regime_table', not distintas, value=float(len(filas) - len(distintas)),
                           tolerance=float(len(filas)), detail=f"{len(filas) - len(distintas)}/{len(filas)} celdas")


def _channel_cell(config: RunConfig) -> CellSpec:
    return CellSpec(None, h=config.validation.channel_h, n_layers=config.validation.channel_n_layers)


def check_poiseuille_tensor(config: RunConfig) -> ValidationCheck:
    tensor = permeability_tensor(_channel_cell(config), tol=config.saddle_tol)
    errores = [relative_error(tensor.matrix[i, i], 1.0 / 12.0) for i in range(2)]
    errores.append(abs(tensor.matrix[0, 1]) * 12.0)
    return _within('poiseuille_tensor', errores, 1e-2)


def check_reciprocity(config: RunConfig) -> ValidationCheck:
    celda = CellSpec(PRESETS['E2'], h=0.1, n_layers=4)
    tensor = permeability_tensor(celda, tol=config.saddle_tol)
    detalle = f"definida positiva: {tensor.is_positive_definite}"
    check = _within('tensor_reciprocity', [tensor.symmetry_defect], 1e-8, detalle)
    check.passed = check.passed and tensor.is_positive_definite
    return check


def check_carreau_channel(config: RunConfig) -> ValidationCheck:
    celda = _channel_cell(config)
    errores = []
    for lam, r in ((1.0, 1.7), (100.0, 2.6)):
        ley = Carreau(config.law.eta_0, config.law.eta_inf, lam, r)
        U = permeability_operator(celda, ley, (1.0, 0.0), config.picard, tol=config.saddle_tol).U[0]
        errores.append(relative_error(U, channel_flux(ley, 1.0)))
    return _within('carreau_channel', errores, 2e-2)


def check_power_darcy(config: RunConfig) -> ValidationCheck:
    """V de la ley tipo potencia en el canal frente al prefactor de referencia × forma cerrada."""
    r = 2.3
    ley = EffectiveLaw.build(_channel_cell(config), r, 2.0, eta_0=1.0, eta_inf=1e-3, lam=1.0,
                             delta_reg=1e-8, opts=config.picard, tol=config.saddle_tol)
    if config.validation.fault == 'prefactor':
        logger.warning("Modo de falla inyectada: prefactor perturbado")
        ley.kind = dataclasses.replace(ley.kind, prefactor=ley.kind.prefactor * FAULT_FACTOR)
    V = ley.velocity((1.0, 0.0))[0]
    referencia = POWER_PREFACTOR_REFERENCE * channel_flux_closed_power(r, 1.0)
    errores = [relative_error(V, referencia), relative_error(ley.kind.prefactor, POWER_PREFACTOR_REFERENCE)]
    return _within('power_darcy_prefactor', errores, 2e-2, f"prefactor {ley.kind.prefactor:.6g}")


def check_power_channel(config: RunConfig) -> ValidationCheck:
    """Ley potencia dilatante r = 3 en el canal 3D frente a la forma cerrada."""
    ley = PowerLaw(1.0, 3.0, 1e-8)
    U = permeability_operator(_channel_cell(config), ley, (1.0, 0.0), config.picard, tol=config.saddle_tol).U[0]
    return _within('power_channel_r3', [relative_error(U, channel_flux_closed_power(3.0, 1.0))], 2e-2)


def check_carreau_channel_small_force(config: RunConfig) -> ValidationCheck:
    celda = _channel_cell(config)
    errores = []
    for lam, r in ((1.0, 1.7), (100.0, 2.6)):
        ley = Carreau(config.law.eta_0, config.law.eta_inf, lam, r)
        U = permeability_operator(celda, ley, (0.1, 0.0), config.picard, tol=config.saddle_tol).U[0]
        errores.append(relative_error(U, channel_flux(ley, 0.1)))
    return _within('carreau_channel_small_force', errores, 2e-2, 'ξ = 0.1')


def check_carreau_channel_shear_thinning(config: RunConfig) -> ValidationCheck:
    ley = Carreau(config.law.eta_0, config.law.eta_inf, 100.0, 1.7)
    celda = _channel_cell(config)
    errores = []
    for xi in (0.1, 1.0):
        U = permeability_operator(celda, ley, (xi, 0.0), config.picard, tol=config.saddle_tol).U[0]
        errores.append(relative_error(U, channel_flux(ley, xi)))
    return _within('carreau_channel_shear_thinning', errores, 2e-2, 'λ = 100, r = 1.7')


def check_carreau_bounds(config: RunConfig) -> ValidationCheck:
    """η∞ ≤ η ≤ η₀ para r < 2 y η ≥ η₀ para r > 2, muestreado en d ∈ [10⁻⁶, 10⁴]."""
    eta_0, eta_inf = config.law.eta_0, config.law.eta_inf
    d = np.logspace(-6, 4, 200)
    violaciones = 0
    for lam in (1.0, 10.0, 100.0):
        eta = viscosity(Carreau(eta_0, eta_inf, lam, 1.7), d)
        violaciones += int(np.count_nonzero((eta > eta_0) | (eta < eta_inf)))
        violaciones += int(np.count_nonzero(viscosity(Carreau(eta_0, eta_inf, lam, 2.6), d) < eta_0))
    return ValidationCheck('carreau_bounds', violaciones == 0, value=float(violaciones), tolerance=0.0)


def check_monotone_stress(config: RunConfig) -> ValidationCheck:
    """s ↦ η(s/√2)·s estrictamente creciente para r > 1."""
    s = np.linspace(1e-6, 1e4, 20001)
    malas = []
    for lam in (1.0, 10.0, 100.0):
        for r in (1.1, 1.7, 2.0, 2.3, 2.6, 4.0):
            tau = stress(Carreau(config.law.eta_0, config.law.eta_inf, lam, r), s)
            if not np.all(np.diff(tau) > 0):
                malas.append(f"λ={lam}, r={r}")
    return ValidationCheck('carreau_monotone_stress', not malas, value=float(len(malas)), tolerance=0.0,
                           detail='; '.join(malas))


def _coarse_e1() -> CellSpec:
    return CellSpec(PRESETS['E1'], h=0.1, n_layers=4)


def check_effective_monotonicity(config: RunConfig) -> ValidationCheck:
    """(𝒰(ξ) − 𝒰(ζ))·(ξ − ζ) > 0 en los 10 pares de 5 fuerzas, para Carreau y potencia."""
    puntos = [np.array([math.cos(a), math.sin(a)]) * (0.3 + 0.15 * k)
              for k, a in enumerate(np.linspace(0.0, 2 * math.pi, 5, endpoint=False))]
    peor = math.inf
    for ley in (Carreau(config.law.eta_0, config.law.eta_inf, 100.0, 2.6), PowerLaw(1.0, 2.3, 1e-8)):
        operador = PermeabilityOperator(_coarse_e1(), ley, config.picard, tol=config.saddle_tol)
        U = [operador(xi).U for xi in puntos]
        for i, j in itertools.combinations(range(len(puntos)), 2):
            dU, dxi = U[i] - U[j], puntos[i] - puntos[j]
            peor = min(peor, float(dU @ dxi) / float(np.linalg.norm(dU) * np.linalg.norm(dxi)))
    return ValidationCheck('effective_monotonicity', peor > 0.0, value=peor, tolerance=0.0,
                           detail='mínimo coseno entre 𝒰(ξ) − 𝒰(ζ) y ξ − ζ')


def check_power_homogeneity(config: RunConfig) -> ValidationCheck:
    """𝒰(tξ) = t^(r'−1) 𝒰(ξ) para la ley potencia."""
    r = 2.3
    operador = PermeabilityOperator(_coarse_e1(), PowerLaw(1.0, r, 1e-10), config.picard, tol=config.saddle_tol)
    base = operador((1.0, 0.0)).U
    errores = []
    for t in (2.0, 10.0):
        esperado = t ** (conjugate_exponent(r) - 1.0) * base
        errores.append(float(np.linalg.norm(operador((t, 0.0)).U - esperado) / np.linalg.norm(esperado)))
    return _within('power_homogeneity', errores, 1e-2, f"r = {r}, t ∈ {{2, 10}}")


CHECKS: List[Callable[[RunConfig], ValidationCheck]] = [
    check_closed_form,
    check_newtonian_channel,
    check_regularization,
    check_regime_table,
    check_poiseuille_tensor,
    check_reciprocity,
    check_carreau_channel,
    check_power_darcy,
    check_power_channel,
    check_carreau_channel_small_force,
    check_carreau_channel_shear_thinning,
    check_carreau_bounds,
    check_monotone_stress,
    check_effective_monotonicity,
    check_power_homogeneity,
]


def run_validation(config: RunConfig, checks=None) -> ValidationReport:
    """Ejecuta todas las verificaciones; un error numérico cuenta como fallo."""
    inicio = time.perf_counter()
    reporte = ValidationReport()
    for check in checks or CHECKS:
        try:
            resultado = check(config)
        except HomogenizationError as e:
            resultado = ValidationCheck(check.__name__.replace('check_', ''), False,
                                        detail=f"{type(e).__name__}: {e.message}")
        estado = 'OK' if resultado.passed else 'FALLO'
        logger.info(f"[{estado}] {resultado.name}: {resultado.value} (tol {resultado.tolerance})")
        reporte.checks.append(resultado)
    reporte.elapsed = time.perf_counter() - inicio
    logger.info(f"Validación: {len(reporte.checks) - len(reporte.failures)}/{len(reporte.checks)} verificaciones OK")
    return reporte
