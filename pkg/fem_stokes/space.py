"""
Espacio de Taylor–Hood P2/P1 sobre la malla de la celda.

Los nodos P2 son los vértices seguidos de los puntos medios de las
aristas. La identificación periódica agrupa nodos en clases (una clase
por nodo físico del toro lateral); el representante de cada clase es su
nodo de menor índice. Una clase es de Dirichlet si alguno de sus
miembros está sobre OBSTACLE, BOTTOM o TOP.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from cell_mesh.extrusion import SNAP_TOL, FacetTag, Mesh3D
from cell_mesh.geometry import HALF
from core.exceptions import PairingIncomplete
from .quadrature import BARYCENTRIC, WEIGHTS

logger = logging.getLogger(__name__)

# Aristas locales del tetraedro, en el orden de los nodos P2 4..9.
LOCAL_EDGES = np.array([[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]])
DIRICHLET_TAGS = (FacetTag.OBSTACLE, FacetTag.BOTTOM, FacetTag.TOP)


def p2_values(lam: np.ndarray) -> np.ndarray:
    """Funciones de base P2 en puntos dados por coordenadas baricéntricas (..., 4)."""
    vertices = lam * (2.0 * lam - 1.0)
    aristas = 4.0 * lam[..., LOCAL_EDGES[:, 0]] * lam[..., LOCAL_EDGES[:, 1]]
    return np.concatenate([vertices, aristas], axis=-1)


def p2_gradients(lam: np.ndarray, grad_lam: np.ndarray) -> np.ndarray:
    """Gradientes P2: lam (nq, 4), grad_lam (nt, 4, 3) -> (nt, nq, 10, 3)."""
    vert = (4.0 * lam - 1.0)[None, :, :, None] * grad_lam[:, None, :, :]
    i, j = LOCAL_EDGES[:, 0], LOCAL_EDGES[:, 1]
    arist = 4.0 * (
        lam[None, :, j, None] * grad_lam[:, None, i, :]
        + lam[None, :, i, None] * grad_lam[:, None, j, :]
    )
    return np.concatenate([vert, arist], axis=2)


@dataclass(frozen=True, eq=False)
class TaylorHoodSpace:
    mesh: Mesh3D
    edges: np.ndarray
    tet_nodes: np.ndarray
    node_coords: np.ndarray
    node_class: np.ndarray
    class_dirichlet: np.ndarray
    class_free_index: np.ndarray
    pressure_class: np.ndarray
    n_pressure_dofs: int
    grad_p2: np.ndarray = field(repr=False)
    qp_weights: np.ndarray = field(repr=False)
    qp_coords: np.ndarray = field(repr=False)

    @property
    def n_nodes(self) -> int:
        return len(self.node_coords)

    @property
    def n_classes(self) -> int:
        return len(self.class_dirichlet)

    @property
    def n_free_classes(self) -> int:
        return int(np.count_nonzero(~self.class_dirichlet))

    @property
    def n_velocity_dofs(self) -> int:
        return 3 * self.n_free_classes

    @property
    def n_identified_velocity_dofs(self) -> int:
        """Grados de libertad tras la identificación, antes de imponer Dirichlet."""
        return 3 * self.n_classes

    @property
    def phi_p2(self) -> np.ndarray:
        return p2_values(BARYCENTRIC)

    @property
    def phi_p1(self) -> np.ndarray:
        return BARYCENTRIC

    def velocity_dofs(self, nodos: np.ndarray) -> np.ndarray:
        """Índices libres (..., 3) de los nodos dados; −1 en nodos de Dirichlet."""
        libre = self.class_free_index[self.node_class[nodos]]
        dofs = 3 * libre[..., None] + np.arange(3)
        return np.where(libre[..., None] >= 0, dofs, -1)

    def expand_velocity(self, u: np.ndarray) -> np.ndarray:
        """Vector libre -> valores nodales (n_nodes, 3) con ceros de Dirichlet."""
        dofs = self.velocity_dofs(np.arange(self.n_nodes))
        nodal = np.where(dofs >= 0, np.asarray(u)[np.maximum(dofs, 0)], 0.0)
        return nodal

    def restrict_velocity(self, nodal: np.ndarray) -> np.ndarray:
        """Valores nodales -> vector libre, tomando el representante de cada clase."""
        u = np.zeros(self.n_velocity_dofs)
        dofs = self.velocity_dofs(np.arange(self.n_nodes))
        libres = dofs >= 0
        u[dofs[libres]] = np.asarray(nodal, dtype=float)[libres]
        return u

    def interpolate(self, funcion) -> np.ndarray:
        """Valores nodales (n_nodes, 3) de ``funcion(x) -> (n, 3)`` sin imponer restricciones."""
        return np.asarray(funcion(self.node_coords), dtype=float).reshape(self.n_nodes, 3)

    def expand_pressure(self, p: np.ndarray) -> np.ndarray:
        return np.asarray(p)[self.pressure_class]

    def dof_report(self) -> dict:
        return {
            'n_p2_nodes': self.n_nodes,
            'n_p2_classes': self.n_classes,
            'n_velocity_dofs': self.n_velocity_dofs,
            'n_dirichlet_classes': int(np.count_nonzero(self.class_dirichlet)),
            'n_pressure_dofs': self.n_pressure_dofs,
        }


def _lateral_node_pairs(coords: np.ndarray, eje: int, candidatos: np.ndarray) -> np.ndarray:
    lo = candidatos[np.abs(coords[candidatos, eje] + HALF) <= SNAP_TOL]
    hi = candidatos[np.abs(coords[candidatos, eje] - HALF) <= SNAP_TOL]
    if len(lo) == 0 and len(hi) == 0:
        return np.empty((0, 2), dtype=np.int64)
    desplazamiento = np.zeros(3)
    desplazamiento[eje] = 1.0
    arbol = cKDTree(coords[hi] - desplazamiento)
    distancia, indice = arbol.query(coords[lo], distance_upper_bound=10 * SNAP_TOL)
    sin_pareja = ~np.isfinite(distancia)
    if len(lo) != len(hi) or np.any(sin_pareja):
        raise PairingIncomplete(
            f"Nodos laterales {'xy'[eje]} sin pareja periódica",
            eje='xy'[eje], lo=len(lo), hi=len(hi), sin_pareja=int(np.count_nonzero(sin_pareja)),
        )
    return np.column_stack([lo, hi[indice]])


def _vertex_pairs(mesh: Mesh3D, eje: int) -> np.ndarray:
    nombre = 'xy'[eje]
    pares = np.asarray(mesh.periodic_pairs.get(nombre, np.empty((0, 2), dtype=np.int64)))
    lo = np.flatnonzero(np.abs(mesh.vertices[:, eje] + HALF) <= SNAP_TOL)
    hi = np.flatnonzero(np.abs(mesh.vertices[:, eje] - HALF) <= SNAP_TOL)
    if (len(pares) != len(lo) or len(pares) != len(hi)
            or not np.array_equal(np.sort(pares[:, 0]), lo) or not np.array_equal(np.sort(pares[:, 1]), hi)):
        raise PairingIncomplete(
            f"Vértices laterales {nombre} sin pareja periódica",
            eje=nombre, pares=len(pares), lo=len(lo), hi=len(hi),
        )
    return pares


def build_space(mesh: Mesh3D) -> TaylorHoodSpace:
    nv = mesh.n_vertices
    locales = mesh.tets[:, LOCAL_EDGES]
    aristas, inverso = np.unique(np.sort(locales.reshape(-1, 2), axis=1), axis=0, return_inverse=True)
    inverso = inverso.reshape(-1)
    tet_nodes = np.hstack([mesh.tets, nv + inverso.reshape(-1, 6)])
    coords = np.vstack([mesh.vertices, 0.5 * (mesh.vertices[aristas[:, 0]] + mesh.vertices[aristas[:, 1]])])
    n_nodes = len(coords)

    # Identificación periódica: vértices por los pares de la malla, aristas por coordenadas.
    nodos_arista = np.arange(nv, n_nodes)
    pares = [_vertex_pairs(mesh, 0), _vertex_pairs(mesh, 1),
             _lateral_node_pairs(coords, 0, nodos_arista), _lateral_node_pairs(coords, 1, nodos_arista)]
    pares = np.vstack(pares)
    grafo = sparse.coo_matrix((np.ones(len(pares)), (pares[:, 0], pares[:, 1])), shape=(n_nodes, n_nodes))
    n_comp, etiquetas = connected_components(grafo, directed=False)
    representante = np.full(n_comp, n_nodes, dtype=np.int64)
    np.minimum.at(representante, etiquetas, np.arange(n_nodes))
    orden = np.argsort(representante)
    node_class = np.empty(n_nodes, dtype=np.int64)
    rango = np.empty(n_comp, dtype=np.int64)
    rango[orden] = np.arange(n_comp)
    node_class[:] = rango[etiquetas]

    # Dirichlet: vértices y puntos medios de las caras OBSTACLE, BOTTOM, TOP.
    caras = mesh.facets[np.isin(mesh.facet_tags, [int(t) for t in DIRICHLET_TAGS])]
    nodo_dirichlet = np.zeros(n_nodes, dtype=bool)
    nodo_dirichlet[caras.reshape(-1)] = True
    if len(caras):
        aristas_cara = np.sort(caras[:, [[0, 1], [0, 2], [1, 2]]].reshape(-1, 2), axis=1)
        claves = aristas[:, 0] * nv + aristas[:, 1]
        buscadas = aristas_cara[:, 0] * nv + aristas_cara[:, 1]
        nodo_dirichlet[nv + np.searchsorted(claves, buscadas)] = True
    class_dirichlet = np.zeros(n_comp, dtype=bool)
    np.logical_or.at(class_dirichlet, node_class, nodo_dirichlet)
    class_free_index = np.full(n_comp, -1, dtype=np.int64)
    class_free_index[~class_dirichlet] = np.arange(int(np.count_nonzero(~class_dirichlet)))

    # Presión P1: las clases de vértices sólo contienen vértices.
    clases_vertice, pressure_class = np.unique(node_class[:nv], return_inverse=True)
    pressure_class = pressure_class.reshape(-1)

    # Geometría en los puntos de cuadratura.
    x = mesh.vertices[mesh.tets]
    jac = np.stack([x[:, 1] - x[:, 0], x[:, 2] - x[:, 0], x[:, 3] - x[:, 0]], axis=2)
    det = np.linalg.det(jac)
    inv = np.linalg.inv(jac)
    grad_lam = np.concatenate([-inv.sum(axis=1, keepdims=True), inv], axis=1)
    grad_p2 = p2_gradients(BARYCENTRIC, grad_lam)
    qp_weights = WEIGHTS[None, :] * np.abs(det)[:, None]
    qp_coords = np.einsum('qa,tad->tqd', BARYCENTRIC, x)

    espacio = TaylorHoodSpace(
        mesh=mesh,
        edges=aristas,
        tet_nodes=tet_nodes,
        node_coords=coords,
        node_class=node_class,
        class_dirichlet=class_dirichlet,
        class_free_index=class_free_index,
        pressure_class=pressure_class,
        n_pressure_dofs=len(clases_vertice),
        grad_p2=grad_p2,
        qp_weights=qp_weights,
        qp_coords=qp_coords,
    )
    logger.info(
        f"Espacio Taylor–Hood: {espacio.n_velocity_dofs} gdl de velocidad, "
        f"{espacio.n_pressure_dofs} de presión ({mesh.n_tets} tetraedros)"
    )
    return espacio
