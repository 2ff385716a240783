"""
Triangulación restringida de la sección Z' \\ T' con meshpy (Triangle).

Los cuatro lados de Z' reciben la misma distribución uniforme de vértices
y se prohíben los puntos de Steiner en el borde, de modo que las caras
laterales opuestas coinciden exactamente tras la traslación periódica.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from meshpy import triangle

from core.exceptions import MeshFailure
from .geometry import HALF, Polygon2D

logger = logging.getLogger(__name__)

MIN_ANGLE = 20.0


@dataclass(frozen=True, eq=False)
class Mesh2D:
    points: np.ndarray
    triangles: np.ndarray
    polygon: Optional[Polygon2D] = None

    def triangle_areas(self) -> np.ndarray:
        p = self.points[self.triangles]
        e1 = p[:, 1] - p[:, 0]
        e2 = p[:, 2] - p[:, 0]
        return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])

    @property
    def area(self) -> float:
        return float(self.triangle_areas().sum())

    @property
    def n_points(self) -> int:
        return len(self.points)


def side_distribution(h: float) -> np.ndarray:
    """Coordenadas de los vértices de un lado de Z', de −1/2 a 1/2."""
    n_lado = max(2, math.ceil(1.0 / h))
    return -HALF + np.arange(n_lado + 1) / n_lado


def _square_loop(t: np.ndarray) -> np.ndarray:
    """Borde de Z' antihorario; las esquinas aparecen una sola vez."""
    bajo = np.full(len(t) - 1, -HALF)
    alto = np.full(len(t) - 1, HALF)
    sube = t[:-1]
    baja = t[::-1][:-1]
    return np.vstack([
        np.column_stack([sube, bajo]),
        np.column_stack([alto, sube]),
        np.column_stack([baja, alto]),
        np.column_stack([bajo, baja]),
    ])


def _loop_segments(inicio: int, n: int) -> np.ndarray:
    idx = np.arange(n)
    return np.column_stack([inicio + idx, inicio + (idx + 1) % n])


def triangulate_cross_section(polygon: Optional[Polygon2D], h: float) -> Mesh2D:
    if not h > 0:
        raise MeshFailure(f"h debe ser > 0 (h={h})", h=h)
    if polygon is not None and not polygon.is_simple():
        raise MeshFailure("El polígono de la inclusión se autointersecta", n_vertices=len(polygon))
    if polygon is not None and polygon.linf_extent >= HALF:
        raise MeshFailure("El polígono no está estrictamente dentro de Z'", extent=polygon.linf_extent)

    t = side_distribution(h)
    cuadrado = _square_loop(t)
    puntos = [cuadrado]
    segmentos = [_loop_segments(0, len(cuadrado))]
    if polygon is not None:
        puntos.append(polygon.vertices)
        segmentos.append(_loop_segments(len(cuadrado), len(polygon)))

    info = triangle.MeshInfo()
    info.set_points(np.vstack(puntos).tolist())
    info.set_facets(np.vstack(segmentos).tolist())
    if polygon is not None:
        info.set_holes([polygon.interior_point.tolist()])

    resultado = triangle.build(
        info,
        max_volume=h * h,
        min_angle=MIN_ANGLE,
        allow_boundary_steiner=False,
    )
    points = np.array(resultado.points, dtype=float)
    triangles = np.array(resultado.elements, dtype=np.int64)
    if triangles.size == 0:
        raise MeshFailure("El triangulador no produjo triángulos", h=h)

    malla = Mesh2D(points, triangles, polygon)
    areas = malla.triangle_areas()
    check_triangle_areas(areas, h)

    _check_lateral_distribution(points, t)
    points.setflags(write=False)
    triangles.setflags(write=False)

    logger.info(f"Sección triangulada: {len(points)} vértices, {len(triangles)} triángulos, área {malla.area:.10f}")
    return malla


def check_triangle_areas(areas: np.ndarray, h: float):
    """Áreas con signo: todas deben ser positivas y no degeneradas."""
    invertidos = int(np.count_nonzero(areas < 0))
    if invertidos:
        raise MeshFailure(f"El triangulador produjo {invertidos} triángulos invertidos", inverted=invertidos)
    minima = float(areas.min())
    if minima <= 1e-14 * h * h:
        raise MeshFailure(f"Triángulo degenerado de área {minima:.3e}", min_area=minima)


def _check_lateral_distribution(points: np.ndarray, t: np.ndarray):
    """Cada lado debe conservar exactamente la distribución pedida."""
    for eje in (0, 1):
        for lado in (-HALF, HALF):
            en_lado = points[points[:, eje] == lado]
            otro = np.sort(en_lado[:, 1 - eje])
            if len(otro) != len(t) or not np.array_equal(otro, t):
                raise MeshFailure(
                    "El triangulador alteró la distribución de vértices de un lado de Z'",
                    eje=eje, lado=lado, esperados=len(t), obtenidos=len(otro),
                )
