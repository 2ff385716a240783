"""
Geometría de la celda unitaria Z' = (−1/2, 1/2)² y de su inclusión T'.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from core.conf import get_setting
from core.exceptions import ClearanceViolation, InvalidShape, MeshFailure

HALF = 0.5


@dataclass(frozen=True)
class InclusionShape:
    kind: str
    radius: Optional[float] = None
    semi_major: Optional[float] = None
    semi_minor: Optional[float] = None
    angle: float = 0.0

    DISK = 'DISK'
    ELLIPSE = 'ELLIPSE'

    def __post_init__(self):
        if self.kind == self.DISK:
            if self.radius is None or not self.radius > 0:
                raise InvalidShape(f"El disco requiere radius > 0 (radius={self.radius})", radius=self.radius)
        elif self.kind == self.ELLIPSE:
            if self.semi_major is None or self.semi_minor is None:
                raise InvalidShape("La elipse requiere semi_major y semi_minor")
            if not self.semi_major >= self.semi_minor > 0:
                raise InvalidShape(
                    f"La elipse requiere semi_major >= semi_minor > 0 "
                    f"(semi_major={self.semi_major}, semi_minor={self.semi_minor})",
                    semi_major=self.semi_major, semi_minor=self.semi_minor,
                )
        else:
            raise InvalidShape(f"Tipo de inclusión desconocido: {self.kind}", kind=self.kind)
        if not math.isfinite(self.angle):
            raise InvalidShape(f"Ángulo inválido: {self.angle}", angle=self.angle)

    @classmethod
    def disk(cls, radius: float, angle: float = 0.0) -> 'InclusionShape':
        return cls(cls.DISK, radius=radius, angle=angle)

    @classmethod
    def ellipse(cls, semi_major: float, semi_minor: float, angle: float = 0.0) -> 'InclusionShape':
        return cls(cls.ELLIPSE, semi_major=semi_major, semi_minor=semi_minor, angle=angle)

    @property
    def semi_axes(self):
        if self.kind == self.DISK:
            return self.radius, self.radius
        return self.semi_major, self.semi_minor

    def rotated(self, angle: float) -> 'InclusionShape':
        """Misma inclusión con el eje mayor a ``angle`` radianes del eje x₁."""
        if self.kind == self.DISK:
            return InclusionShape.disk(self.radius, angle=angle)
        return InclusionShape.ellipse(self.semi_major, self.semi_minor, angle=angle)

    def as_dict(self) -> dict:
        datos = {'kind': self.kind, 'angle': self.angle}
        if self.kind == self.DISK:
            datos['radius'] = self.radius
        else:
            datos.update(semi_major=self.semi_major, semi_minor=self.semi_minor)
        return datos


# Inclusiones de referencia de los experimentos; NONE es la celda sin obstáculo.
PRESETS = {
    'E1': InclusionShape.disk(0.1),
    'E2': InclusionShape.ellipse(0.3, 0.1, angle=0.0),
    'E3': InclusionShape.ellipse(0.3, 0.1, angle=math.pi / 2),
    'E4': InclusionShape.disk(0.3),
    'NONE': None,
}


def preset(nombre: str) -> Optional[InclusionShape]:
    try:
        return PRESETS[nombre.upper()]
    except KeyError:
        raise InvalidShape(f"Preset desconocido: {nombre}", preset=nombre) from None


@dataclass(frozen=True)
class CellSpec:
    """Celda a mallar: inclusión (o ninguna) y resolución."""

    shape: Optional[InclusionShape]
    n_seg: int = None  # type: ignore[assignment]
    h: float = None  # type: ignore[assignment]
    n_layers: int = None  # type: ignore[assignment]

    def __post_init__(self):
        for campo, clave in (('n_seg', 'N_SEG'), ('h', 'H'), ('n_layers', 'N_LAYERS')):
            if getattr(self, campo) is None:
                object.__setattr__(self, campo, get_setting(clave))
        if self.n_seg < 16:
            raise InvalidShape(f"n_seg debe ser >= 16 (n_seg={self.n_seg})", n_seg=self.n_seg)
        if self.n_layers < 4:
            raise InvalidShape(f"n_layers debe ser >= 4 (n_layers={self.n_layers})", n_layers=self.n_layers)
        if not self.h > 0:
            raise InvalidShape(f"h debe ser > 0 (h={self.h})", h=self.h)

    def with_shape(self, shape: Optional[InclusionShape]) -> 'CellSpec':
        return CellSpec(shape, n_seg=self.n_seg, h=self.h, n_layers=self.n_layers)


class Polygon2D:
    """Polígono cerrado, sin repetir el primer vértice al final."""

    def __init__(self, vertices):
        self.vertices = np.ascontiguousarray(vertices, dtype=float)
        if self.vertices.ndim != 2 or self.vertices.shape[1] != 2 or len(self.vertices) < 3:
            raise MeshFailure("Un polígono requiere al menos 3 vértices 2D")
        self.vertices.setflags(write=False)

    def __len__(self):
        return len(self.vertices)

    @property
    def signed_area(self) -> float:
        x, y = self.vertices[:, 0], self.vertices[:, 1]
        return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))

    @property
    def area(self) -> float:
        return abs(self.signed_area)

    @property
    def is_ccw(self) -> bool:
        return self.signed_area > 0

    @property
    def perimeter(self) -> float:
        return float(np.linalg.norm(np.roll(self.vertices, -1, axis=0) - self.vertices, axis=1).sum())

    @property
    def linf_extent(self) -> float:
        return float(np.abs(self.vertices).max())

    @property
    def interior_point(self) -> np.ndarray:
        """Media de los vértices; interior para polígonos convexos."""
        return self.vertices.mean(axis=0)

    def segments(self) -> np.ndarray:
        n = len(self.vertices)
        return np.column_stack([np.arange(n), (np.arange(n) + 1) % n])

    def is_simple(self) -> bool:
        """Ningún par de lados no adyacentes se corta."""
        p = self.vertices
        q = np.roll(p, -1, axis=0)
        n = len(p)

        def orient(a, b, c):
            return (b[..., 0] - a[..., 0]) * (c[..., 1] - a[..., 1]) - (b[..., 1] - a[..., 1]) * (c[..., 0] - a[..., 0])

        i, j = np.triu_indices(n, k=2)
        no_adyacentes = ~((i == 0) & (j == n - 1))
        i, j = i[no_adyacentes], j[no_adyacentes]
        if len(i) == 0:
            return True
        d1 = orient(p[i], q[i], p[j])
        d2 = orient(p[i], q[i], q[j])
        d3 = orient(p[j], q[j], p[i])
        d4 = orient(p[j], q[j], q[i])
        cruzan = (d1 * d2 <= 0) & (d3 * d4 <= 0)
        # Segmentos colineales disjuntos también dan productos nulos.
        colineales = (d1 == 0) & (d2 == 0)
        if np.any(colineales & cruzan):
            a, b, c, d = p[i], q[i], p[j], q[j]
            solapan = (
                (np.maximum(np.minimum(a[:, 0], b[:, 0]), np.minimum(c[:, 0], d[:, 0]))
                 <= np.minimum(np.maximum(a[:, 0], b[:, 0]), np.maximum(c[:, 0], d[:, 0])))
                & (np.maximum(np.minimum(a[:, 1], b[:, 1]), np.minimum(c[:, 1], d[:, 1]))
                   <= np.minimum(np.maximum(a[:, 1], b[:, 1]), np.maximum(c[:, 1], d[:, 1])))
            )
            cruzan = np.where(colineales, solapan, cruzan)
        return not bool(np.any(cruzan))


def build_inclusion_polygon(shape: InclusionShape, n_seg: int, clearance: float = None) -> Polygon2D:
    """Polígono antihorario inscrito en el borde exacto de la inclusión."""
    if n_seg < 3:
        raise InvalidShape(f"n_seg debe ser >= 3 (n_seg={n_seg})", n_seg=n_seg)
    clearance = float(get_setting('CLEARANCE')) if clearance is None else float(clearance)

    a, b = shape.semi_axes
    t = 2.0 * np.pi * np.arange(n_seg) / n_seg
    local = np.column_stack([a * np.cos(t), b * np.sin(t)])
    c, s = math.cos(shape.angle), math.sin(shape.angle)
    if shape.angle != 0.0:
        local = local @ np.array([[c, s], [-s, c]])
    poligono = Polygon2D(local)

    extension = poligono.linf_extent
    if extension >= HALF - clearance:
        raise ClearanceViolation(
            f"La inclusión llega a {extension:.6g} del centro; el máximo es {HALF - clearance:.6g}",
            extent=extension, clearance=clearance,
        )
    return poligono
