"""
Iteración de punto fijo (Picard) para viscosidades dependientes de |𝔻[u]|.

Cada iteración congela la viscosidad en el iterado anterior, resuelve el
problema lineal con SYMMETRIC_GRADIENT y relaja el par (u, π) con ω. Si la iteración
se estanca o agota max_iter, ω se reduce a la mitad una sola vez.
"""

import logging
from dataclasses import dataclass

import numpy as np

from core.conf import get_setting
from core.exceptions import ConfigError, NoConvergence
from rheology.laws import Carreau, Newtonian, PowerLaw, ViscosityLaw
from .assembly import GradientForm, assemble
from .fields import deformation_norm_field
from .solver import SaddleFactorization, StokesSolution, zero_solution
from .space import TaylorHoodSpace

logger = logging.getLogger(__name__)

STAGNATION_WINDOW = 4
STAGNATION_RATIO = 0.97


@dataclass(frozen=True)
class PicardOptions:
    max_iter: int = None  # type: ignore[assignment]
    tol_rel: float = None  # type: ignore[assignment]
    relax: float = None  # type: ignore[assignment]

    def __post_init__(self):
        for campo, clave in (('max_iter', 'PICARD_MAX_ITER'), ('tol_rel', 'PICARD_TOL_REL'),
                             ('relax', 'PICARD_RELAX')):
            if getattr(self, campo) is None:
                object.__setattr__(self, campo, get_setting(clave))
        if self.max_iter < 1:
            raise ConfigError(f"max_iter debe ser >= 1 (max_iter={self.max_iter})")
        if not self.tol_rel > 0:
            raise ConfigError(f"tol_rel debe ser > 0 (tol_rel={self.tol_rel})")
        if not 0 < self.relax <= 1:
            raise ConfigError(f"relax debe estar en (0, 1] (relax={self.relax})")


def initial_viscosity(law: ViscosityLaw) -> float:
    """Viscosidad constante del primer iterado."""
    if isinstance(law, Newtonian):
        return law.eta
    if isinstance(law, Carreau):
        return law.eta_0
    if isinstance(law, PowerLaw):
        return law.mu
    raise ConfigError(f"Ley de viscosidad no soportada: {type(law).__name__}")


def _stagnated(historia: list) -> bool:
    if len(historia) <= STAGNATION_WINDOW:
        return False
    ultimos = np.asarray(historia[-(STAGNATION_WINDOW + 1):])
    with np.errstate(divide='ignore', invalid='ignore'):
        razones = ultimos[1:] / ultimos[:-1]
    return bool(np.all(np.isfinite(razones)) and razones.mean() >= STAGNATION_RATIO)


def picard_solve(space: TaylorHoodSpace, law: ViscosityLaw, f, opts: PicardOptions = None,
                 tol: float = None) -> StokesSolution:
    opts = opts or PicardOptions()
    f = np.asarray(f, dtype=float).reshape(3)
    if not np.all(np.isfinite(f)):
        raise ConfigError(f"Fuerza no finita: {f.tolist()}")
    if not np.any(f):
        return zero_solution(space, history=[], relax=opts.relax, converged=True)

    forma = GradientForm.SYMMETRIC_GRADIENT
    base = assemble(space, initial_viscosity(law), forma, f)
    primera = SaddleFactorization(base).solve(tol=tol)
    if isinstance(law, Newtonian):
        primera.diagnostics.update(history=[], relax=opts.relax, converged=True)
        return primera

    u_prev, p_prev = primera.velocity, primera.pressure
    omega = opts.relax
    historia, etapa, reducido, total = [], [], False, 0
    while True:
        total += 1
        eta = law.evaluate(deformation_norm_field(space, u_prev))
        solucion = SaddleFactorization(base.with_viscosity(eta)).solve(tol=tol, pressure=p_prev)
        u = omega * solucion.velocity + (1.0 - omega) * u_prev
        p = omega * solucion.pressure + (1.0 - omega) * p_prev
        norma = float(np.linalg.norm(u))
        incremento = float(np.linalg.norm(u - u_prev)) / norma if norma > 0 else 0.0
        historia.append(incremento)
        etapa.append(incremento)
        u_prev, p_prev = u, p
        logger.debug(f"Picard it {total}: incremento relativo {incremento:.3e} (ω={omega})")

        if incremento <= opts.tol_rel:
            break
        if _stagnated(etapa) or len(etapa) >= opts.max_iter:
            if reducido:
                raise NoConvergence(
                    f"Picard sin convergencia tras {total} iteraciones (último incremento {incremento:.3e})",
                    history=historia, relax=omega,
                )
            reducido = True
            omega *= 0.5
            etapa = []
            logger.warning(f"Picard estancado en la iteración {total}; se reduce ω a {omega}")

    solucion.velocity, solucion.pressure = u, p
    solucion.diagnostics.update(
        iterations=total,
        history=historia,
        relax=omega,
        converged=True,
        divergence=float(np.linalg.norm(base.B @ u)),
    )
    logger.info(f"Picard convergió en {total} iteraciones (ω={omega}, incremento {historia[-1]:.2e})")
    return solucion
