"""
Soluciones de referencia 1D del canal plano (celda sin obstáculo).

Para un flujo unidireccional w(z) con w(0) = w(1) = 0 el balance de
esfuerzos es viscosity(s/√2)·s/2 = ξ·(1/2 − z), s = w'(z). El caudal es

    U = ∫₀¹ w dz = ∫₀¹ |s(z)|·|1/2 − z| dz.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from core.exceptions import ConfigError, RootBracketFailure
from rheology.laws import PowerLaw, ViscosityLaw, conjugate_exponent, stress

logger = logging.getLogger(__name__)

N_PANELS = 64
GAUSS_POINTS = 5
S_MAX_LIMIT = 1e30
ROOT_RTOL = 1e-14


def _composite_gauss(n_paneles: int = N_PANELS, n_puntos: int = GAUSS_POINTS):
    """Paneles simétricos respecto de z = 1/2, graduados cuadráticamente hacia el plano medio."""
    x, w = np.polynomial.legendre.leggauss(n_puntos)
    mitad = n_paneles // 2
    t = 0.5 * (np.arange(mitad + 1) / mitad) ** 2
    bordes = np.concatenate([0.5 - t[::-1], 0.5 + t[1:]])
    a, b = bordes[:-1, None], bordes[1:, None]
    z = 0.5 * (b - a) * x[None, :] + 0.5 * (a + b)
    pesos = 0.5 * (b - a) * w[None, :]
    return bordes, z, pesos


def shear_rate(law: ViscosityLaw, carga: float) -> float:
    """Raíz s ≥ 0 de stress(law, s)/2 = carga."""
    if carga == 0.0:
        return 0.0

    def residuo(s):
        return 0.5 * stress(law, s) - carga

    s_max = 1.0
    while residuo(s_max) <= 0.0:
        s_max *= 10.0
        if s_max > S_MAX_LIMIT:
            raise RootBracketFailure(
                f"No se pudo acotar la tasa de corte para la carga {carga:.3e}",
                load=carga, s_max=s_max,
            )
    return brentq(residuo, 0.0, s_max, xtol=1e-300, rtol=ROOT_RTOL, maxiter=500)


@dataclass(frozen=True, eq=False)
class ChannelProfile:
    z: np.ndarray
    shear: np.ndarray
    z_nodes: np.ndarray
    velocity: np.ndarray
    flux: float


def channel_profile(law: ViscosityLaw, xi: float) -> ChannelProfile:
    """Perfil w'(z) en los puntos de Gauss y w(z) en los bordes de los paneles."""
    if not xi >= 0:
        raise ConfigError(f"xi debe ser >= 0 (xi={xi})", xi=xi)
    bordes, z, pesos = _composite_gauss()
    tau = 0.5 - z
    # Simetría respecto de z = 1/2: se resuelve sólo la mitad inferior.
    mitad = z < 0.5
    s_mitad = np.array([shear_rate(law, xi * t) for t in tau[mitad]])
    s = np.empty_like(z)
    s[mitad] = s_mitad
    s[~mitad] = -s_mitad[::-1]

    w = np.concatenate([[0.0], np.cumsum((pesos * s).sum(axis=1))])
    flux = float(np.sum(pesos * np.abs(s) * np.abs(tau)))
    return ChannelProfile(z=z.reshape(-1), shear=s.reshape(-1), z_nodes=bordes, velocity=w, flux=flux)


def channel_flux(law: ViscosityLaw, xi: float) -> float:
    return channel_profile(law, xi).flux


def channel_flux_closed_power(r: float, xi: float) -> float:
    """ξ^(r'−1)/(2^(r'/2)(r'+1)), caudal del canal con ley de potencia μ=1, δ=0."""
    if not xi >= 0:
        raise ConfigError(f"xi debe ser >= 0 (xi={xi})", xi=xi)
    rp = conjugate_exponent(r)
    if xi == 0:
        return 0.0
    return xi ** (rp - 1.0) / (2.0 ** (rp / 2.0) * (rp + 1.0))


def channel_flux_newtonian(eta: float, xi: float) -> float:
    return xi / (6.0 * eta)


def relative_error(valor: float, referencia: float) -> float:
    return abs(valor - referencia) / abs(referencia) if referencia else abs(valor)


def closed_form_check(r_list=(2.3, 2.6, 3.0), xi_list=(0.1, 1.0, 10.0)) -> list:
    """Compara el caudal numérico de la ley de potencia pura con la fórmula cerrada."""
    filas = []
    for r in r_list:
        ley = PowerLaw(1.0, r, 0.0)
        for xi in xi_list:
            numerico = channel_flux(ley, xi)
            cerrado = channel_flux_closed_power(r, xi)
            filas.append({'r': r, 'xi': xi, 'numeric': numerico, 'closed': cerrado,
                          'rel_error': relative_error(numerico, cerrado)})
    logger.debug(f"Verificación de forma cerrada: error máximo {max(f['rel_error'] for f in filas):.2e}")
    return filas
