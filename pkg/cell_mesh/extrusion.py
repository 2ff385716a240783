"""
Extrusión de la sección triangulada a tetraedros de Z_f = (Z' \\ T') × (0, 1).
"""

import logging
from dataclasses import dataclass, field
from enum import IntEnum
from functools import lru_cache
from typing import Dict

import numpy as np
from scipy.spatial import cKDTree

from core.exceptions import MeshFailure, OrientationFailure, PeriodicPairingError
from .geometry import HALF, CellSpec, build_inclusion_polygon
from .triangulation import Mesh2D, triangulate_cross_section

logger = logging.getLogger(__name__)

SNAP_TOL = 1e-12
VOLUME_TOL = 1e-10


class FacetTag(IntEnum):
    OBSTACLE = 1
    BOTTOM = 2
    TOP = 3
    X_LO = 4
    X_HI = 5
    Y_LO = 6
    Y_HI = 7
    INTERIOR = 8


LATERAL_TAGS = (FacetTag.X_LO, FacetTag.X_HI, FacetTag.Y_LO, FacetTag.Y_HI)


def tet_signed_volumes(vertices: np.ndarray, tets: np.ndarray) -> np.ndarray:
    p = vertices[tets]
    return np.einsum('ij,ij->i', p[:, 1] - p[:, 0], np.cross(p[:, 2] - p[:, 0], p[:, 3] - p[:, 0])) / 6.0


def triangle_areas_3d(vertices: np.ndarray, facets: np.ndarray) -> np.ndarray:
    p = vertices[facets]
    return 0.5 * np.linalg.norm(np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]), axis=1)


@dataclass(frozen=True, eq=False)
class Mesh3D:
    """Malla tetraédrica inmutable del fluido con caras etiquetadas."""

    vertices: np.ndarray
    tets: np.ndarray
    facets: np.ndarray
    facet_tags: np.ndarray
    periodic_pairs: Dict[str, np.ndarray]
    n_layers: int
    cross_section: Mesh2D = field(repr=False)
    n_interior_facets: int = 0

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_tets(self) -> int:
        return len(self.tets)

    def tet_volumes(self) -> np.ndarray:
        return tet_signed_volumes(self.vertices, self.tets)

    @property
    def volume(self) -> float:
        return float(self.tet_volumes().sum())

    def facets_with(self, tag: FacetTag) -> np.ndarray:
        return self.facets[self.facet_tags == tag]

    def tag_area(self, tag: FacetTag) -> float:
        return float(triangle_areas_3d(self.vertices, self.facets_with(tag)).sum())

    @property
    def obstacle_area(self) -> float:
        return self.tag_area(FacetTag.OBSTACLE)

    def edges(self) -> np.ndarray:
        pares = self.tets[:, [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]]].reshape(-1, 2)
        return np.unique(np.sort(pares, axis=1), axis=0)

    def quality_report(self) -> dict:
        volumenes = self.tet_volumes()
        aristas = self.edges()
        longitudes = np.linalg.norm(self.vertices[aristas[:, 1]] - self.vertices[aristas[:, 0]], axis=1)
        conteo = {tag.name: int(np.count_nonzero(self.facet_tags == tag)) for tag in FacetTag if tag != FacetTag.INTERIOR}
        conteo[FacetTag.INTERIOR.name] = self.n_interior_facets
        return {
            'n_vertices': self.n_vertices,
            'n_tets': self.n_tets,
            'volume': float(volumenes.sum()),
            'min_tet_volume': float(volumenes.min()),
            'min_edge': float(longitudes.min()),
            'max_edge': float(longitudes.max()),
            'obstacle_area': self.obstacle_area,
            'facet_counts': conteo,
        }


def _lexicographic_rank(points: np.ndarray) -> np.ndarray:
    orden = np.lexsort((points[:, 1], points[:, 0]))
    rango = np.empty(len(points), dtype=np.int64)
    rango[orden] = np.arange(len(points))
    return rango


def _split_prisms(mesh2d: Mesh2D, n_layers: int) -> np.ndarray:
    """Tres tetraedros por prisma con la diagonal de menor a mayor rango."""
    n2 = mesh2d.n_points
    rango = _lexicographic_rank(mesh2d.points)
    tri = np.take_along_axis(mesh2d.triangles, np.argsort(rango[mesh2d.triangles], axis=1), axis=1)
    a, b, c = tri[:, 0], tri[:, 1], tri[:, 2]

    bloques = []
    for capa in range(n_layers):
        abajo, arriba = capa * n2, (capa + 1) * n2
        bloques.append(np.column_stack([a + abajo, b + abajo, c + abajo, c + arriba]))
        bloques.append(np.column_stack([a + abajo, b + abajo, b + arriba, c + arriba]))
        bloques.append(np.column_stack([a + abajo, a + arriba, b + arriba, c + arriba]))
    return np.vstack(bloques)


def _boundary_facets(tets: np.ndarray):
    caras = tets[:, [[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]]].reshape(-1, 3)
    ordenadas = np.sort(caras, axis=1)
    _, inverso, cuenta = np.unique(ordenadas, axis=0, return_inverse=True, return_counts=True)
    inverso = inverso.reshape(-1)
    borde = cuenta[inverso] == 1
    n_interiores = int(np.count_nonzero(cuenta == 2))
    return caras[borde], n_interiores


def _tag_facets(vertices: np.ndarray, facets: np.ndarray) -> np.ndarray:
    p = vertices[facets]
    etiquetas = np.full(len(facets), FacetTag.OBSTACLE, dtype=np.int64)
    reglas = (
        (2, 0.0, FacetTag.BOTTOM),
        (2, 1.0, FacetTag.TOP),
        (0, -HALF, FacetTag.X_LO),
        (0, HALF, FacetTag.X_HI),
        (1, -HALF, FacetTag.Y_LO),
        (1, HALF, FacetTag.Y_HI),
    )
    for eje, valor, tag in reglas:
        sobre = np.all(np.abs(p[:, :, eje] - valor) <= SNAP_TOL, axis=1)
        etiquetas[sobre] = tag
    return etiquetas


def periodic_vertex_pairs(vertices: np.ndarray, eje: int) -> np.ndarray:
    """Pares (lo, hi) de vértices de caras opuestas; hi − lo = e_eje."""
    lo = np.flatnonzero(np.abs(vertices[:, eje] + HALF) <= SNAP_TOL)
    hi = np.flatnonzero(np.abs(vertices[:, eje] - HALF) <= SNAP_TOL)
    nombre = 'xy'[eje]
    if len(lo) != len(hi):
        raise PeriodicPairingError(
            f"Caras {nombre} opuestas con distinto número de vértices ({len(lo)} vs {len(hi)})",
            eje=nombre, lo=len(lo), hi=len(hi),
        )
    desplazamiento = np.zeros(3)
    desplazamiento[eje] = 1.0
    arbol = cKDTree(vertices[hi] - desplazamiento)
    distancia, indice = arbol.query(vertices[lo], distance_upper_bound=SNAP_TOL * 10)
    if np.any(~np.isfinite(distancia)) or np.any(distancia > SNAP_TOL):
        raise PeriodicPairingError(f"Vértices de la cara {nombre} sin pareja periódica", eje=nombre)
    if len(np.unique(indice)) != len(indice):
        raise PeriodicPairingError(f"Emparejamiento periódico no biyectivo en {nombre}", eje=nombre)
    return np.column_stack([lo, hi[indice]])


def extrude_to_tets(mesh2d: Mesh2D, n_layers: int) -> Mesh3D:
    if n_layers < 1:
        raise MeshFailure(f"n_layers debe ser >= 1 (n_layers={n_layers})", n_layers=n_layers)
    n2 = mesh2d.n_points
    z = np.arange(n_layers + 1) / n_layers
    vertices = np.column_stack([
        np.tile(mesh2d.points, (n_layers + 1, 1)),
        np.repeat(z, n2),
    ])

    tets = _split_prisms(mesh2d, n_layers)
    volumenes = tet_signed_volumes(vertices, tets)
    negativos = volumenes < 0
    tets[negativos] = tets[negativos][:, [1, 0, 2, 3]]
    volumenes = np.abs(volumenes)
    if np.any(volumenes <= 0):
        malos = int(np.count_nonzero(volumenes <= 0))
        raise OrientationFailure(f"{malos} tetraedros con volumen no positivo", n_bad=malos)

    pares = {'x': periodic_vertex_pairs(vertices, 0), 'y': periodic_vertex_pairs(vertices, 1)}
    facets, n_interiores = _boundary_facets(tets)
    etiquetas = _tag_facets(vertices, facets)

    for arreglo in (vertices, tets, facets, etiquetas, pares['x'], pares['y']):
        arreglo.setflags(write=False)
    malla = Mesh3D(
        vertices=vertices,
        tets=tets,
        facets=facets,
        facet_tags=etiquetas,
        periodic_pairs=pares,
        n_layers=n_layers,
        cross_section=mesh2d,
        n_interior_facets=n_interiores,
    )
    logger.debug(f"Extrusión: {malla.n_vertices} vértices, {malla.n_tets} tetraedros")
    return malla


@lru_cache(maxsize=32)
def build_cell_mesh(spec: CellSpec) -> Mesh3D:
    """Malla de la celda descrita por ``spec``; el resultado se comparte entre hilos."""
    poligono = None if spec.shape is None else build_inclusion_polygon(spec.shape, spec.n_seg)
    seccion = triangulate_cross_section(poligono, spec.h)
    malla = extrude_to_tets(seccion, spec.n_layers)

    esperado = 1.0 - (0.0 if poligono is None else poligono.area)
    if abs(malla.volume - esperado) > VOLUME_TOL:
        raise MeshFailure(
            f"Volumen de la malla {malla.volume:.12f} difiere de |Z_f| = {esperado:.12f}",
            volume=malla.volume, expected=esperado,
        )
    logger.info(
        f"Malla de celda {spec.shape.kind if spec.shape else 'NONE'}: "
        f"{malla.n_vertices} vértices, {malla.n_tets} tetraedros, volumen {malla.volume:.10f}"
    )
    return malla
