"""
Solución del sistema de punto silla por gradiente conjugado sobre el
complemento de Schur.

Sólo se factoriza el bloque de velocidad A (simétrico definido positivo);
con FULL_GRADIENT A = I₃ ⊗ K y basta factorizar el bloque escalar K.
S = B A⁻¹ Bᵀ se aplica con sustituciones triangulares y se precondiciona
con la masa de presión ponderada por η⁻¹. La restricción ∫π = 0 se impone
proyectando: las constantes forman el núcleo de Bᵀ.
"""

import logging
import time
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from core.conf import get_setting
from core.exceptions import SolverBreakdown
from .assembly import GradientForm, SaddleSystem, assemble_pressure_mass
from .space import TaylorHoodSpace

logger = logging.getLogger(__name__)

MAX_SCHUR_ITER = 500
# El CG exterior se detiene un par de órdenes por debajo de la tolerancia pedida.
SCHUR_MARGIN = 1e-2


@dataclass(eq=False)
class StokesSolution:
    space: TaylorHoodSpace
    velocity: np.ndarray
    pressure: np.ndarray
    diagnostics: dict = field(default_factory=dict)

    def nodal_velocity(self) -> np.ndarray:
        return self.space.expand_velocity(self.velocity)

    def vertex_pressure(self) -> np.ndarray:
        return self.space.expand_pressure(self.pressure)

    def velocity_integral(self) -> np.ndarray:
        """∫_{Z_f} u dz."""
        return velocity_integral(self.space, self.nodal_velocity())

    def pressure_mean(self) -> float:
        w = self.space.qp_weights
        valores = np.einsum('qp,tp->tq', self.space.phi_p1, self.vertex_pressure()[self.space.mesh.tets])
        return float((w * valores).sum() / w.sum())


def velocity_integral(space: TaylorHoodSpace, nodal: np.ndarray) -> np.ndarray:
    integrales = np.einsum('tq,qa->ta', space.qp_weights, space.phi_p2)
    return np.einsum('ta,tai->i', integrales, nodal[space.tet_nodes])


def zero_solution(space: TaylorHoodSpace, **diagnostics) -> StokesSolution:
    return StokesSolution(
        space=space,
        velocity=np.zeros(space.n_velocity_dofs),
        pressure=np.zeros(space.n_pressure_dofs),
        diagnostics={
            'iterations': 0, 'schur_iterations': 0, 'residual': 0.0, 'divergence': 0.0,
            'residual_history': [], **diagnostics,
        },
    )


def factor_spd(matrix: sparse.spmatrix, nombre: str = 'A'):
    """LU de una matriz SPD con ordenamiento simétrico y pivoteo diagonal."""
    try:
        return splu(
            sparse.csc_matrix(matrix),
            permc_spec='MMD_AT_PLUS_A',
            diag_pivot_thresh=0.0,
            options=dict(SymmetricMode=True),
        )
    except RuntimeError as e:
        raise SolverBreakdown(f"Factorización de {nombre} fallida: {e}", n=matrix.shape[0]) from e


class VelocitySolver:
    """A⁻¹ por sustitución; con FULL_GRADIENT se factoriza un único bloque escalar."""

    def __init__(self, A: sparse.spmatrix, form: GradientForm):
        self.A = sparse.csr_matrix(A)
        self.componentwise = form is GradientForm.FULL_GRADIENT
        bloque = self.A[0::3, 0::3] if self.componentwise else self.A
        self.order = bloque.shape[0]
        self._lu = factor_spd(bloque)
        self.factor_nnz = int(self._lu.L.nnz + self._lu.U.nnz)

    def solve(self, b: np.ndarray) -> np.ndarray:
        if self.componentwise:
            columnas = np.ascontiguousarray(np.reshape(b, (-1, 3)))
            return self._lu.solve(columnas).reshape(-1)
        return self._lu.solve(np.asarray(b, dtype=float))

    def refined_solve(self, b: np.ndarray) -> np.ndarray:
        x = self.solve(b)
        return x + self.solve(b - self.A @ x)


class SaddleFactorization:
    """Factorización reutilizable del bloque de velocidad para varios lados derechos."""

    def __init__(self, system: SaddleSystem):
        self.system = system
        inicio = time.perf_counter()
        self.velocity = VelocitySolver(system.A, system.form)
        masa = system.M if system.M is not None else assemble_pressure_mass(system.space)
        self._masa = factor_spd(masa, 'M')
        self._m = np.asarray(system.m, dtype=float)
        self._volumen = float(self._m.sum())
        logger.debug(
            f"Bloque de velocidad de orden {self.velocity.order} factorizado en "
            f"{time.perf_counter() - inicio:.2f}s (nnz L+U = {self.velocity.factor_nnz})"
        )

    def _mean_free(self, q: np.ndarray) -> np.ndarray:
        return q - (self._m @ q) / self._volumen

    def _precondition(self, r: np.ndarray) -> np.ndarray:
        return self._mean_free(self._masa.solve(r))

    def solve(self, rhs: np.ndarray = None, tol: float = None, pressure: np.ndarray = None) -> StokesSolution:
        """Resuelve con carga ``rhs``; ``pressure`` es un iterado inicial opcional."""
        sistema = self.system
        tol = float(get_setting('SADDLE_TOL')) if tol is None else float(tol)
        f = sistema.rhs if rhs is None else np.asarray(rhs, dtype=float)
        norma_f = float(np.linalg.norm(f))
        if norma_f == 0.0:
            return zero_solution(sistema.space)

        B = sistema.B
        p = np.zeros(sistema.n_pressure) if pressure is None else self._mean_free(np.array(pressure, dtype=float))
        u = self.velocity.solve(f - B.T @ p)
        r = B @ u
        historia = [float(np.linalg.norm(r)) / norma_f]
        z = self._precondition(r)
        d = z.copy()
        rz = float(r @ z)
        iteraciones = 0
        while iteraciones < MAX_SCHUR_ITER and historia[-1] > SCHUR_MARGIN * tol:
            w = self.velocity.solve(B.T @ d)
            curvatura = float(d @ (B @ w))
            if not (curvatura > 0.0 and rz > 0.0):
                break
            alfa = rz / curvatura
            p += alfa * d
            u -= alfa * w
            r = B @ u
            iteraciones += 1
            historia.append(float(np.linalg.norm(r)) / norma_f)
            if not np.isfinite(historia[-1]):
                break
            z = self._precondition(r)
            rz_nuevo = float(r @ z)
            d = z + (rz_nuevo / rz) * d
            rz = rz_nuevo

        p = self._mean_free(p)
        carga = f - B.T @ p
        u = self.velocity.refined_solve(carga)
        residuo = np.concatenate([carga - sistema.A @ u, B @ u])
        relativo = float(np.linalg.norm(residuo)) / norma_f
        historia.append(relativo)
        if not (np.isfinite(relativo) and relativo <= tol):
            raise SolverBreakdown(
                f"El sistema de punto silla no alcanzó la tolerancia {tol:.1e} "
                f"(residuo {relativo:.3e} tras {iteraciones} iteraciones de CG)",
                residual_history=historia, tol=tol,
            )
        logger.debug(f"Punto silla resuelto: {iteraciones} it. de CG, residuo {relativo:.3e}")
        return StokesSolution(
            space=sistema.space,
            velocity=u,
            pressure=p,
            diagnostics={
                'iterations': 1,
                'schur_iterations': iteraciones,
                'residual': relativo,
                'residual_history': historia,
                'divergence': float(np.linalg.norm(B @ u)),
            },
        )


def solve_saddle(system: SaddleSystem, tol: float = None) -> StokesSolution:
    if not np.any(system.rhs):
        return zero_solution(system.space)
    return SaddleFactorization(system).solve(tol=tol)
