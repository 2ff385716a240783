"""
Exportación de mallas de celda en formato Gmsh MSH 2.2 ASCII (meshio).
"""

import logging
from pathlib import Path

import meshio
import numpy as np

from .extrusion import FacetTag, Mesh3D

logger = logging.getLogger(__name__)

# Etiqueta física del volumen fluido, distinta de las de caras.
FLUID_PHYSICAL_TAG = 100


def to_meshio(mesh: Mesh3D) -> meshio.Mesh:
    fisico_tets = np.full(mesh.n_tets, FLUID_PHYSICAL_TAG, dtype=np.int32)
    fisico_caras = np.asarray(mesh.facet_tags, dtype=np.int32)
    field_data = {tag.name: np.array([int(tag), 2]) for tag in FacetTag if tag != FacetTag.INTERIOR}
    field_data['FLUID'] = np.array([FLUID_PHYSICAL_TAG, 3])
    return meshio.Mesh(
        points=np.asarray(mesh.vertices),
        cells=[('tetra', np.asarray(mesh.tets)), ('triangle', np.asarray(mesh.facets))],
        cell_data={
            'gmsh:physical': [fisico_tets, fisico_caras],
            'gmsh:geometrical': [fisico_tets.copy(), fisico_caras.copy()],
        },
        field_data=field_data,
    )


def write_msh(mesh: Mesh3D, path) -> Path:
    """Escribe vértices, tetraedros y caras etiquetadas en ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    meshio.write(str(path), to_meshio(mesh), file_format='gmsh22', binary=False)
    logger.info(f"Malla exportada a {path} ({mesh.n_tets} tetraedros, {len(mesh.facets)} caras)")
    return path
