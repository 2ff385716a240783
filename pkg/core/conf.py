"""
Acceso a los valores por defecto numéricos.

Los valores viven en ``settings.HOMOGENIZACION``; si Django no está
configurado (uso como librería) se usa la tabla interna.
"""

from django.conf import settings
from django.core.exceptions import ImproperlyConfigured

DEFAULTS = {
    'ETA_0': 1.0,
    'ETA_INF': 1e-3,
    'LAMBDA': 1.0,
    'DELTA_REG': 1e-6,
    'CLEARANCE': 0.05,
    'N_SEG': 64,
    'H': 0.08,
    'N_LAYERS': 8,
    'SADDLE_TOL': 1e-10,
    'PICARD_MAX_ITER': 100,
    'PICARD_TOL_REL': 1e-8,
    'PICARD_RELAX': 1.0,
    'THREADS': 1,
    'OUTPUT_DIR': 'resultados',
}


def get_setting(name: str):
    """Retorna el valor configurado para ``name`` o el valor por defecto."""
    try:
        configurados = getattr(settings, 'HOMOGENIZACION', {})
    except ImproperlyConfigured:
        configurados = {}
    if name in configurados:
        return configurados[name]
    return DEFAULTS[name]
