"""
Escritura de resultados: CSV con cabecera fija por comando y registros JSON.
"""

import csv
import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

logger = logging.getLogger(__name__)

AMPLITUDE_HEADER = ('r', 'f1', 'V1', 'V2', 'iters', 'resid', 'error')
ROTATION_HEADER = ('r', 'theta', 'f1', 'f2', 'V1', 'V2', 'normV', 'iters', 'resid', 'error')
PERMEABILITY_HEADER = ('theta', 'A11', 'A12', 'A21', 'A22', 'eig_min', 'eig_max', 'n_tets')


def format_value(valor) -> str:
    """Números con 9 cifras significativas; vacío para valores ausentes."""
    if valor is None:
        return ''
    if isinstance(valor, bool):
        return str(valor).lower()
    if isinstance(valor, int):
        return str(valor)
    if isinstance(valor, float):
        if not math.isfinite(valor):
            return ''
        return format(valor, '.9g')
    return str(valor)


@dataclass
class SweepRecord:
    """Fila de un barrido; V₃ se omite porque es idénticamente nulo."""

    r: float
    f1: float
    f2: float
    theta: Optional[float] = None
    V1: Optional[float] = None
    V2: Optional[float] = None
    iters: Optional[int] = None
    resid: Optional[float] = None
    error: str = ''

    @property
    def ok(self) -> bool:
        return not self.error

    @property
    def normV(self) -> Optional[float]:
        if self.V1 is None or self.V2 is None:
            return None
        return math.hypot(self.V1, self.V2)

    def values(self, header: Iterable[str]) -> list:
        return [getattr(self, columna) for columna in header]

    def as_dict(self) -> dict:
        return {
            'r': self.r, 'theta': self.theta, 'f1': self.f1, 'f2': self.f2,
            'V1': self.V1, 'V2': self.V2, 'normV': self.normV,
            'iters': self.iters, 'resid': self.resid, 'error': self.error,
        }


def write_csv(path, header, rows) -> Path:
    """CSV UTF-8, separador ``,`` y fin de línea LF."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open('w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(header)
        for fila in rows:
            writer.writerow([format_value(v) for v in fila])
    logger.info(f"CSV escrito: {path}")
    return path


def write_records(path, header, records) -> Path:
    return write_csv(path, header, (r.values(header) for r in records))


def _serializable(obj):
    if isinstance(obj, dict):
        return {str(k): _serializable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_serializable(v) for v in obj]
    if isinstance(obj, Path):
        return str(obj)
    if hasattr(obj, 'tolist'):
        return _serializable(obj.tolist())
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def write_json(path, payload: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open('w', encoding='utf-8', newline='\n') as f:
        json.dump(_serializable(payload), f, indent=2, sort_keys=True, ensure_ascii=False)
        f.write('\n')
    logger.info(f"JSON escrito: {path}")
    return path
