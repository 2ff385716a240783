"""
Volcado del sistema KKT (Matrix Market) y de la solución (VTK legado).
"""

import logging
from pathlib import Path

import meshio
import numpy as np
from scipy.io import mmwrite

from .assembly import SaddleSystem
from .solver import StokesSolution

logger = logging.getLogger(__name__)


def write_kkt(system: SaddleSystem, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    mmwrite(str(path), system.kkt_matrix(), comment=f'KKT {system.form.value}')
    rhs_path = path.with_name(path.stem + '_rhs.mtx')
    mmwrite(str(rhs_path), system.kkt_rhs().reshape(-1, 1))
    logger.info(f"Sistema KKT exportado a {path}")
    return path


def write_vtk(solution: StokesSolution, path) -> Path:
    """Velocidad y presión restringidas a los vértices, en VTK ASCII."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    space = solution.space
    nv = space.mesh.n_vertices
    malla = meshio.Mesh(
        points=np.asarray(space.mesh.vertices),
        cells=[('tetra', np.asarray(space.mesh.tets))],
        point_data={
            'velocity': solution.nodal_velocity()[:nv],
            'pressure': solution.vertex_pressure(),
        },
    )
    meshio.write(str(path), malla, file_format='vtk', binary=False)
    logger.info(f"Solución exportada a {path}")
    return path
