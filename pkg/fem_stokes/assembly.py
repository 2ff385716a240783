"""
Ensamblado del sistema de punto silla del problema de celda.

    a(u, v) − ∫ π div v = ∫ f·v,     −∫ q div u = 0,     ∫ π = 0.

FULL_GRADIENT usa a(u, v) = ∫ η ∇u:∇v; SYMMETRIC_GRADIENT usa
a(u, v) = ∫ η 𝔻[u]:𝔻[v]. Para campos de divergencia nula la segunda es
la mitad de la primera.
"""

import enum
import logging
import dataclasses
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from core.exceptions import NonpositiveViscosity
from .space import TaylorHoodSpace

logger = logging.getLogger(__name__)


class GradientForm(enum.Enum):
    FULL_GRADIENT = 'FULL_GRADIENT'
    SYMMETRIC_GRADIENT = 'SYMMETRIC_GRADIENT'


@dataclass(frozen=True, eq=False)
class SaddleSystem:
    space: TaylorHoodSpace
    A: sparse.csr_matrix
    B: sparse.csr_matrix
    m: np.ndarray
    rhs: np.ndarray
    form: GradientForm
    M: sparse.csr_matrix = None

    @property
    def n_velocity(self) -> int:
        return self.A.shape[0]

    @property
    def n_pressure(self) -> int:
        return self.B.shape[0]

    def kkt_matrix(self) -> sparse.csc_matrix:
        """Forma orlada [[A, Bᵀ, 0], [B, 0, m], [0, mᵀ, 0]] que se exporta en Matrix Market."""
        columna = sparse.csr_matrix(self.m.reshape(-1, 1))
        return sparse.bmat([
            [self.A, self.B.T, None],
            [self.B, None, columna],
            [None, columna.T, None],
        ], format='csc')

    def kkt_rhs(self, rhs: np.ndarray = None) -> np.ndarray:
        rhs = self.rhs if rhs is None else rhs
        return np.concatenate([rhs, np.zeros(self.n_pressure + 1)])

    def with_viscosity(self, viscosity) -> 'SaddleSystem':
        """Mismo B y misma carga con otra viscosidad en los puntos de cuadratura."""
        return dataclasses.replace(
            self,
            A=assemble_viscous_block(self.space, viscosity, self.form),
            M=assemble_pressure_mass(self.space, viscosity),
        )


def check_viscosity(space: TaylorHoodSpace, viscosity) -> np.ndarray:
    eta = np.broadcast_to(np.asarray(viscosity, dtype=float), space.qp_weights.shape)
    malos = ~(np.isfinite(eta) & (eta > 0))
    if np.any(malos):
        peor = float(eta[malos].flat[0])
        raise NonpositiveViscosity(
            f"Viscosidad no positiva en {int(np.count_nonzero(malos))} puntos de cuadratura (p. ej. {peor})",
            n_bad=int(np.count_nonzero(malos)), example=peor,
        )
    return eta


def _scatter(space: TaylorHoodSpace, local: np.ndarray, filas: np.ndarray, columnas: np.ndarray, forma):
    """Suma bloques locales (nt, r, c) en una matriz dispersa, omitiendo índices −1."""
    r = np.broadcast_to(filas[:, :, None], local.shape).reshape(-1)
    c = np.broadcast_to(columnas[:, None, :], local.shape).reshape(-1)
    v = local.reshape(-1)
    validos = (r >= 0) & (c >= 0)
    return sparse.coo_matrix((v[validos], (r[validos], c[validos])), shape=forma).tocsr()


def assemble_viscous_block(space: TaylorHoodSpace, viscosity, form: GradientForm) -> sparse.csr_matrix:
    eta = check_viscosity(space, viscosity)
    c = space.qp_weights * eta
    g = space.grad_p2
    nt = len(g)
    escalar = np.einsum('tq,tqad,tqbd->tab', c, g, g)
    identidad = np.eye(3)
    if form is GradientForm.FULL_GRADIENT:
        local = np.einsum('tab,ij->taibj', escalar, identidad)
    else:
        cruzado = np.einsum('tq,tqaj,tqbi->taibj', c, g, g)
        local = 0.5 * (np.einsum('tab,ij->taibj', escalar, identidad) + cruzado)
    local = local.reshape(nt, 30, 30)
    dofs = space.velocity_dofs(space.tet_nodes).reshape(nt, 30)
    n = space.n_velocity_dofs
    return _scatter(space, local, dofs, dofs, (n, n))


def assemble_divergence(space: TaylorHoodSpace):
    """B = −∫ q div u y la fila de media m = ∫ q."""
    g = space.grad_p2
    nt = len(g)
    w = space.qp_weights
    local = -np.einsum('tq,qp,tqai->tpai', w, space.phi_p1, g).reshape(nt, 4, 30)
    filas = space.pressure_class[space.mesh.tets]
    columnas = space.velocity_dofs(space.tet_nodes).reshape(nt, 30)
    B = _scatter(space, local, filas, columnas, (space.n_pressure_dofs, space.n_velocity_dofs))
    masa = np.einsum('tq,qp->tp', w, space.phi_p1)
    m = np.bincount(filas.reshape(-1), weights=masa.reshape(-1), minlength=space.n_pressure_dofs)
    return B, m


def assemble_pressure_mass(space: TaylorHoodSpace, viscosity=1.0) -> sparse.csr_matrix:
    """M = ∫ η⁻¹ p q, equivalente espectral del complemento de Schur B A⁻¹ Bᵀ."""
    eta = check_viscosity(space, viscosity)
    phi = space.phi_p1
    local = np.einsum('tq,qa,qb->tab', space.qp_weights / eta, phi, phi)
    clases = space.pressure_class[space.mesh.tets]
    n = space.n_pressure_dofs
    return _scatter(space, local, clases, clases, (n, n))


def load_vector(space: TaylorHoodSpace, f) -> np.ndarray:
    """rhs = ∫ f·v para f constante."""
    f = np.asarray(f, dtype=float).reshape(3)
    integrales = np.einsum('tq,qa->ta', space.qp_weights, space.phi_p2)
    local = integrales[:, :, None] * f[None, None, :]
    dofs = space.velocity_dofs(space.tet_nodes)
    validos = dofs >= 0
    return np.bincount(dofs[validos], weights=local[validos], minlength=space.n_velocity_dofs)


def assemble(space: TaylorHoodSpace, viscosity_at_qp, gradient_form: GradientForm, f) -> SaddleSystem:
    A = assemble_viscous_block(space, viscosity_at_qp, gradient_form)
    B, m = assemble_divergence(space)
    M = assemble_pressure_mass(space, viscosity_at_qp)
    rhs = load_vector(space, f)
    logger.debug(f"Sistema ensamblado ({gradient_form.value}): A {A.shape} nnz={A.nnz}, B {B.shape}")
    return SaddleSystem(space=space, A=A, B=B, m=m, rhs=rhs, form=gradient_form, M=M)
