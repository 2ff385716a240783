"""
Campos derivados de la velocidad evaluados en los puntos de cuadratura.
"""

import numpy as np

from .space import TaylorHoodSpace


def _nodal(space: TaylorHoodSpace, velocity) -> np.ndarray:
    if hasattr(velocity, 'nodal_velocity'):
        return velocity.nodal_velocity()
    velocity = np.asarray(velocity, dtype=float)
    if velocity.ndim == 1:
        return space.expand_velocity(velocity)
    return velocity


def velocity_gradient_field(space: TaylorHoodSpace, velocity) -> np.ndarray:
    """∇u en cada punto de cuadratura, (nt, nq, 3, 3) con [i, j] = ∂_j u_i."""
    nodal = _nodal(space, velocity)
    return np.einsum('tai,tqaj->tqij', nodal[space.tet_nodes], space.grad_p2)


def deformation_norm_field(space: TaylorHoodSpace, velocity) -> np.ndarray:
    """|𝔻[u]| (norma de Frobenius) en cada punto de cuadratura.

    ``velocity`` puede ser una StokesSolution, un vector libre o valores
    nodales (n_nodes, 3).
    """
    grad = velocity_gradient_field(space, velocity)
    sim = 0.5 * (grad + np.swapaxes(grad, -1, -2))
    return np.sqrt(np.einsum('tqij,tqij->tq', sim, sim))


def dissipation(space: TaylorHoodSpace, velocity, viscosity) -> float:
    """Σ_qp w·η·|𝔻[u]|²."""
    d = deformation_norm_field(space, velocity)
    return float(np.sum(space.qp_weights * viscosity * d * d))


def gradient_energy(space: TaylorHoodSpace, velocity, viscosity=1.0) -> float:
    """Σ_qp w·η·∇u:∇u."""
    grad = velocity_gradient_field(space, velocity)
    return float(np.sum(space.qp_weights * viscosity * np.einsum('tqij,tqij->tq', grad, grad)))
