"""
Jerarquía de errores del toolkit de homogeneización.

Cada error lleva el código de salida que usan los comandos de gestión:
2 configuración/geometría, 3 solver, 4 validación.
"""

from typing import Any, Dict, List, Optional


class HomogenizationError(Exception):
    """Error base de todas las apps numéricas."""

    exit_code = 1

    def __init__(self, message: str, **context: Any):
        super().__init__(message)
        self.message = message
        self.context: Dict[str, Any] = context

    def as_dict(self) -> Dict[str, Any]:
        return {'error': type(self).__name__, 'mensaje': self.message, **self.context}


# Configuración

class ConfigError(HomogenizationError):
    exit_code = 2


class InvalidLaw(ConfigError):
    """Parámetros de una ley de viscosidad fuera de su dominio."""


class InvalidShape(ConfigError):
    """Parámetros de inclusión inválidos (radio, semiejes)."""


# Geometría y mallado

class GeometryError(HomogenizationError):
    exit_code = 2


class ClearanceViolation(GeometryError):
    """La inclusión toca (o casi toca) el borde de la celda Z'."""


class MeshFailure(GeometryError):
    """El triangulador produjo triángulos invertidos o degenerados."""


class OrientationFailure(GeometryError):
    """Algún tetraedro quedó con volumen no positivo."""


class PeriodicPairingError(GeometryError):
    """Las caras laterales opuestas no se corresponden vértice a vértice."""


class PairingIncomplete(GeometryError):
    """Un grado de libertad lateral no tiene pareja periódica."""


# Solvers

class SolverError(HomogenizationError):
    exit_code = 3


class NonpositiveViscosity(SolverError):
    """Viscosidad no positiva (o no finita) en algún punto de cuadratura."""


class SolverBreakdown(SolverError):
    """El sistema KKT no alcanzó la tolerancia pedida."""

    def __init__(self, message: str, residual_history: Optional[List[float]] = None, **context: Any):
        super().__init__(message, **context)
        self.residual_history = list(residual_history or [])


class NoConvergence(SolverError):
    """La iteración de punto fijo agotó sus iteraciones."""

    def __init__(self, message: str, history: Optional[List[float]] = None, **context: Any):
        super().__init__(message, **context)
        self.history = list(history or [])


class RootBracketFailure(SolverError):
    """No se pudo acotar la raíz del balance de esfuerzos del canal."""


# Validación

class ValidationFailure(HomogenizationError):
    exit_code = 4
