"""
Barridos en amplitud y en rotación de la fuerza f', y tabla de permeabilidad rotada.

Cada punto es un problema de celda independiente; los puntos se despachan a
un pool de hilos y las filas se devuelven en el orden de la grilla.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, Sequence

import numpy as np

from core.exceptions import SolverError
from homogenize.effective import EffectiveLaw
from homogenize.permeability import TENSOR_FORMS, cell_space, permeability_tensor, rotated_permeability_table
from .config import RunConfig
from .records import SweepRecord

logger = logging.getLogger(__name__)


def ordered_map(fn: Callable, items: Sequence, threads: int = 1) -> list:
    """``[fn(x) for x in items]``, en paralelo si ``threads > 1``, conservando el orden."""
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads, thread_name_prefix='celda') as pool:
        return list(pool.map(fn, items))


def build_law(config: RunConfig, r: float) -> EffectiveLaw:
    return EffectiveLaw.build(
        config.cell, r, config.law.gamma,
        eta_0=config.law.eta_0, eta_inf=config.law.eta_inf, lam=config.law.lam,
        delta_reg=config.law.delta_reg, opts=config.picard, tol=config.saddle_tol,
        family=config.law.family,
    )


def evaluate_point(ley: EffectiveLaw, f1: float, f2: float, theta: Optional[float] = None) -> SweepRecord:
    """Una fila del barrido; los fallos del solver quedan en la columna ``error``."""
    registro = SweepRecord(r=ley.r, f1=float(f1), f2=float(f2), theta=theta)
    try:
        V, muestra = ley.sample((f1, f2))
    except SolverError as e:
        registro.error = f"{type(e).__name__}: {e.message}"
        logger.warning(f"Punto r={ley.r}, f=({f1:.4g}, {f2:.4g}) fallido: {registro.error}")
        return registro
    registro.V1, registro.V2 = float(V[0]), float(V[1])
    if muestra is None:
        diagnostico = ley.data.diagnostics
        registro.iters = 0
        registro.resid = float(max(diagnostico.get('residuals', [0.0])))
    else:
        registro.iters = int(muestra.diagnostics.get('iterations', 0))
        registro.resid = float(muestra.diagnostics.get('residual', 0.0))
        if not muestra.w3_ok:
            logger.warning(f"∫w₃ = {muestra.w3_integral:.3e} no despreciable en r={ley.r}, f=({f1}, {f2})")
    return registro


def _laws(config: RunConfig) -> List[EffectiveLaw]:
    cell_space(config.cell)
    leyes = [build_law(config, r) for r in config.law.r_list]
    for ley in leyes:
        logger.info(f"r={ley.r}: {ley.kind.label}")
    return leyes


def sweep_amplitude(config: RunConfig) -> List[SweepRecord]:
    """V(f₁) sobre la grilla de amplitudes, para cada r de la familia."""
    leyes = _laws(config)
    f2 = config.sweeps.f2
    registros = []
    for ley in leyes:
        puntos = list(config.sweeps.amplitude_values)
        registros.extend(ordered_map(lambda f1: evaluate_point(ley, f1, f2), puntos, config.threads))
        logger.info(f"Barrido en amplitud r={ley.r}: {len(puntos)} puntos")
    return registros


def sweep_rotation(config: RunConfig) -> List[SweepRecord]:
    """V para f' = a(cos θ, sin θ) sobre la grilla de ángulos."""
    leyes = _laws(config)
    a = config.sweeps.rotation_amplitude
    registros = []
    for ley in leyes:
        thetas = list(config.sweeps.theta_values)
        registros.extend(ordered_map(
            lambda t: evaluate_point(ley, a * math.cos(t), a * math.sin(t), theta=t), thetas, config.threads,
        ))
        logger.info(f"Barrido en rotación r={ley.r}: {len(thetas)} ángulos")
    return registros


def permeability_rows(config: RunConfig) -> list:
    """Filas de 𝒜: la celda configurada, o la inclusión girada a cada ángulo pedido."""
    forma = TENSOR_FORMS[config.tensor_form]
    if config.sweeps.permeability_angles:
        return rotated_permeability_table(
            config.cell, config.sweeps.permeability_angles, tol=config.saddle_tol, form=forma)
    angulo = config.cell.shape.angle if config.cell.shape is not None else 0.0
    tensor = permeability_tensor(config.cell, tol=config.saddle_tol, form=forma)
    return [{'theta': float(angulo), **tensor.as_dict()}]


def curves_by_r(registros: Iterable[SweepRecord]) -> dict:
    """{r: (f1, V1)} con los puntos exitosos de un barrido en amplitud."""
    curvas = {}
    for reg in registros:
        if reg.ok:
            curvas.setdefault(reg.r, ([], []))
            curvas[reg.r][0].append(reg.f1)
            curvas[reg.r][1].append(reg.V1)
    return {r: (np.asarray(f), np.asarray(v)) for r, (f, v) in curvas.items()}


def find_crossing(x, y_a, y_b) -> Optional[float]:
    """Abscisa del único cambio de signo de y_a − y_b, por interpolación lineal.

    Retorna None si no hay cambio de signo o si hay más de uno.
    """
    x = np.asarray(x, dtype=float)
    d = np.asarray(y_a, dtype=float) - np.asarray(y_b, dtype=float)
    signos = np.sign(d)
    no_nulos = np.flatnonzero(signos)
    if no_nulos.size < 2:
        return None
    cambios = np.flatnonzero(signos[no_nulos][1:] != signos[no_nulos][:-1])
    if cambios.size != 1:
        return None
    i, j = no_nulos[cambios[0]], no_nulos[cambios[0] + 1]
    if j - i > 1:
        # Hay ceros exactos entre ambos puntos.
        return float(x[i + 1])
    return float(x[i] - d[i] * (x[j] - x[i]) / (d[j] - d[i]))


def regime_summary(registros: Iterable[SweepRecord]) -> dict:
    """Conteos de puntos exitosos y fallidos por r."""
    resumen = {}
    for reg in registros:
        entrada = resumen.setdefault(str(reg.r), {'ok': 0, 'failed': 0})
        entrada['ok' if reg.ok else 'failed'] += 1
    return resumen
