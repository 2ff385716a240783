"""
Tensor de permeabilidad 𝒜 y operador de permeabilidad 𝒰 de la celda.

𝒜ᵢⱼ = ∫_{Z_f} wⁱⱼ dz, con wⁱ la solución del problema de celda lineal
(forma FULL_GRADIENT, η = 1) con fuerza eᵢ. 𝒰(ξ') = ∫_{Z_f} w'_{ξ'} dz,
con w_{ξ'} la solución del problema no lineal (SYMMETRIC_GRADIENT).
"""

import logging
import math
import time
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from cell_mesh.extrusion import build_cell_mesh
from cell_mesh.geometry import CellSpec
from core.exceptions import ConfigError, InvalidLaw
from fem_stokes.assembly import GradientForm, assemble, load_vector
from fem_stokes.picard import PicardOptions, picard_solve
from fem_stokes.solver import SaddleFactorization
from fem_stokes.space import TaylorHoodSpace, build_space
from rheology.laws import Carreau, PowerLaw, ViscosityLaw

logger = logging.getLogger(__name__)

W3_TOL = 1e-6


@lru_cache(maxsize=32)
def cell_space(cell: CellSpec) -> TaylorHoodSpace:
    return build_space(build_cell_mesh(cell))


def rotation(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


@dataclass(frozen=True, eq=False)
class PermeabilityTensor:
    matrix: np.ndarray
    n_tets: int = 0
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, 'matrix', np.asarray(self.matrix, dtype=float).reshape(2, 2))

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(0.5 * (self.matrix + self.matrix.T))

    @property
    def symmetry_defect(self) -> float:
        """|𝒜₁₂ − 𝒜₂₁| / ‖𝒜‖."""
        return float(abs(self.matrix[0, 1] - self.matrix[1, 0]) / np.linalg.norm(self.matrix))

    @property
    def is_positive_definite(self) -> bool:
        return bool(np.all(self.eigenvalues > 0))

    def rotated(self, theta: float) -> 'PermeabilityTensor':
        """R 𝒜 Rᵀ: tensor esperado si la inclusión gira θ (exacto sólo para θ = kπ/2)."""
        R = rotation(theta)
        return PermeabilityTensor(R @ self.matrix @ R.T, self.n_tets)

    def apply(self, xi) -> np.ndarray:
        return self.matrix @ np.asarray(xi, dtype=float).reshape(2)

    def as_dict(self) -> dict:
        minimo, maximo = self.eigenvalues
        return {
            'A11': float(self.matrix[0, 0]), 'A12': float(self.matrix[0, 1]),
            'A21': float(self.matrix[1, 0]), 'A22': float(self.matrix[1, 1]),
            'eig_min': float(minimo), 'eig_max': float(maximo), 'n_tets': self.n_tets,
        }


# Nombre en el RunConfig de la forma del operador viscoso del problema de celda lineal.
TENSOR_FORMS = {
    'laplacian': GradientForm.FULL_GRADIENT,
    'symmetric': GradientForm.SYMMETRIC_GRADIENT,
}


def permeability_tensor(cell: CellSpec, tol: float = None,
                        form: GradientForm = GradientForm.FULL_GRADIENT) -> PermeabilityTensor:
    """Resuelve el problema de celda para e₁ y e₂ con una sola factorización.

    Con ``form=SYMMETRIC_GRADIENT`` el operador es −div 𝔻 y el tensor resulta
    el doble del de −Δ.
    """
    inicio = time.perf_counter()
    espacio = cell_space(cell)
    sistema = assemble(espacio, 1.0, form, (1.0, 0.0, 0.0))
    factorizacion = SaddleFactorization(sistema)

    cargas = [load_vector(espacio, e) for e in np.eye(3)[:2]]
    soluciones = [factorizacion.solve(carga, tol=tol) for carga in cargas]
    # 𝒜ᵢⱼ = rhs_jᵀ uⁱ es la integral exacta de wⁱⱼ.
    matriz = np.array([[cargas[j] @ soluciones[i].velocity for j in range(2)] for i in range(2)])
    w3 = [float(load_vector(espacio, (0.0, 0.0, 1.0)) @ s.velocity) for s in soluciones]

    tensor = PermeabilityTensor(
        matriz,
        n_tets=espacio.mesh.n_tets,
        diagnostics={
            'w3_integrals': w3,
            'residuals': [s.diagnostics['residual'] for s in soluciones],
            'divergence': [s.diagnostics['divergence'] for s in soluciones],
            'form': form.value,
            'schur_iterations': [s.diagnostics['schur_iterations'] for s in soluciones],
            'factor_order': factorizacion.velocity.order,
            'elapsed': time.perf_counter() - inicio,
            **espacio.dof_report(),
        },
    )
    logger.info(
        f"𝒜 = [[{matriz[0, 0]:.7g}, {matriz[0, 1]:.3g}], [{matriz[1, 0]:.3g}, {matriz[1, 1]:.7g}]] "
        f"({tensor.n_tets} tetraedros, {tensor.diagnostics['elapsed']:.1f}s)"
    )
    return tensor


def rotated_permeability_table(cell: CellSpec, angles, tol: float = None,
                               form: GradientForm = GradientForm.FULL_GRADIENT) -> list:
    """𝒜(θ) para la inclusión de ``cell`` girada a cada ángulo."""
    if cell.shape is None:
        raise ConfigError("La tabla rotada requiere una inclusión")
    filas = []
    for theta in angles:
        tensor = permeability_tensor(cell.with_shape(cell.shape.rotated(float(theta))), tol=tol, form=form)
        filas.append({'theta': float(theta), **tensor.as_dict()})
    return filas


@dataclass(eq=False)
class OperatorSample:
    xi: np.ndarray
    U: np.ndarray
    w3_integral: float
    diagnostics: dict = field(default_factory=dict)

    @property
    def w3_ok(self) -> bool:
        return abs(self.w3_integral) <= W3_TOL * (1.0 + float(np.linalg.norm(self.U)))

    def as_dict(self) -> dict:
        return {
            'xi': [float(v) for v in self.xi],
            'U': [float(v) for v in self.U],
            'w3_integral': self.w3_integral,
            'iterations': self.diagnostics.get('iterations'),
            'residual': self.diagnostics.get('residual'),
        }


class PermeabilityOperator:
    """𝒰 evaluado bajo demanda: un problema de celda no lineal por cada ξ'."""

    def __init__(self, cell: CellSpec, law: ViscosityLaw, opts: PicardOptions = None, tol: float = None):
        if not isinstance(law, (Carreau, PowerLaw)):
            raise ConfigError(f"El operador de permeabilidad requiere Carreau o PowerLaw, no {type(law).__name__}")
        if isinstance(law, PowerLaw) and law.r > 2 and law.delta_reg == 0:
            raise InvalidLaw(
                f"La ley potencia r={law.r} sin regularización sólo se admite en el oráculo de canal",
                r=law.r, delta_reg=law.delta_reg,
            )
        self.cell = cell
        self.law = law
        self.opts = opts or PicardOptions()
        self.tol = tol

    @property
    def space(self) -> TaylorHoodSpace:
        return cell_space(self.cell)

    def __call__(self, xi) -> OperatorSample:
        xi = np.asarray(xi, dtype=float).reshape(2)
        solucion = picard_solve(self.space, self.law, (xi[0], xi[1], 0.0), self.opts, tol=self.tol)
        integral = solucion.velocity_integral()
        muestra = OperatorSample(
            xi=xi, U=integral[:2], w3_integral=float(integral[2]), diagnostics=dict(solucion.diagnostics),
        )
        logger.debug(f"𝒰({xi.tolist()}) = {muestra.U.tolist()} en {solucion.diagnostics.get('iterations')} it")
        return muestra


def permeability_operator(cell: CellSpec, law: ViscosityLaw, xi, opts: PicardOptions = None,
                          tol: float = None) -> OperatorSample:
    return PermeabilityOperator(cell, law, opts, tol=tol)(xi)
