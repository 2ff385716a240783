"""
Carga del RunConfig: JSON Schema (jsonschema) y luego serializers de DRF.
"""

import json
import logging
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from pathlib import Path
from typing import Optional

import jsonschema
import numpy as np

from cell_mesh.geometry import CellSpec, InclusionShape, preset
from core.conf import get_setting
from core.exceptions import ConfigError
from fem_stokes.picard import PicardOptions
from .serializers import RunConfigSerializer

logger = logging.getLogger(__name__)

SCHEMA_PATH = Path(__file__).resolve().parent / 'schema' / 'run_config.schema.json'
CONFIGS_DIR = Path(__file__).resolve().parent / 'configs'


@lru_cache(maxsize=1)
def run_config_schema() -> dict:
    with SCHEMA_PATH.open(encoding='utf-8') as f:
        return json.load(f)


@dataclass(frozen=True)
class LawSettings:
    eta_0: float
    eta_inf: float
    lam: float
    r_list: tuple
    gamma: float
    delta_reg: float
    family: bool = True

    @property
    def r(self) -> float:
        return self.r_list[0]


@dataclass(frozen=True)
class SweepSettings:
    amplitude_values: tuple
    f2: float
    theta_values: tuple
    rotation_amplitude: float
    permeability_angles: tuple = ()


@dataclass(frozen=True)
class OutputSettings:
    dir: Path
    write_kkt: bool = False
    write_vtk: bool = False


@dataclass(frozen=True)
class ValidationSettings:
    fault: Optional[str] = None
    channel_h: float = 0.5
    channel_n_layers: int = 16


@dataclass(frozen=True)
class RunConfig:
    name: str
    cell: CellSpec
    law: LawSettings
    picard: PicardOptions
    saddle_tol: float
    sweeps: SweepSettings
    output: OutputSettings
    validation: ValidationSettings
    threads: int = 1
    tensor_form: str = 'laplacian'
    raw: dict = field(default_factory=dict, compare=False)

    def with_overrides(self, out=None, threads=None, resolution=None) -> 'RunConfig':
        """Aplica los flags ``--out``, ``--threads`` y ``--resolution`` de la línea de comandos."""
        cambios = {}
        if out is not None:
            cambios['output'] = replace(self.output, dir=Path(out))
        if threads is not None:
            if threads < 1:
                raise ConfigError(f"--threads debe ser >= 1 (threads={threads})")
            cambios['threads'] = int(threads)
        if resolution is not None:
            h, n_layers = parse_resolution(resolution)
            cambios['cell'] = CellSpec(self.cell.shape, n_seg=self.cell.n_seg, h=h, n_layers=n_layers)
        return replace(self, **cambios) if cambios else self

    def as_dict(self) -> dict:
        """Configuración efectiva, en el formato de los registros JSON."""
        return {
            'name': self.name,
            'cell': {
                'shape': self.cell.shape.as_dict() if self.cell.shape else None,
                'n_seg': self.cell.n_seg, 'h': self.cell.h, 'n_layers': self.cell.n_layers,
            },
            'law': {
                'eta_0': self.law.eta_0, 'eta_inf': self.law.eta_inf, 'lambda': self.law.lam,
                'r_list': list(self.law.r_list), 'gamma': self.law.gamma,
                'delta_reg': self.law.delta_reg, 'family': self.law.family,
            },
            'solver': {
                'saddle_tol': self.saddle_tol, 'picard_max_iter': self.picard.max_iter,
                'picard_tol_rel': self.picard.tol_rel, 'picard_relax': self.picard.relax,
                'tensor_form': self.tensor_form,
            },
            'sweeps': {
                'amplitude': list(self.sweeps.amplitude_values), 'f2': self.sweeps.f2,
                'theta': list(self.sweeps.theta_values),
                'rotation_amplitude': self.sweeps.rotation_amplitude,
                'permeability_angles': list(self.sweeps.permeability_angles),
            },
            'output': {
                'dir': str(self.output.dir), 'write_kkt': self.output.write_kkt,
                'write_vtk': self.output.write_vtk,
            },
            'validation': {
                'fault': self.validation.fault, 'channel_h': self.validation.channel_h,
                'channel_n_layers': self.validation.channel_n_layers,
            },
            'threads': self.threads,
        }


def parse_resolution(texto: str):
    """``"h,n_layers"`` → (h, n_layers)."""
    try:
        h, capas = str(texto).split(',')
        h, capas = float(h), int(capas)
    except ValueError:
        raise ConfigError(f"--resolution debe tener la forma h,n_layers (recibido {texto!r})") from None
    if not h > 0 or capas < 4:
        raise ConfigError(f"Resolución inválida: h={h}, n_layers={capas}", h=h, n_layers=capas)
    return h, capas


def amplitude_grid(start: float, stop: float, step: float) -> tuple:
    n = int(round((stop - start) / step)) + 1
    return tuple(float(v) for v in np.round(start + step * np.arange(n), 12))


def _shape(celda: dict) -> Optional[InclusionShape]:
    if 'shape' in celda:
        datos = celda['shape']
        if datos is None:
            forma = None
        elif datos['kind'] == 'disk':
            forma = InclusionShape.disk(datos['radius'], angle=datos.get('angle', 0.0))
        else:
            forma = InclusionShape.ellipse(datos['semi_major'], datos['semi_minor'], angle=datos.get('angle', 0.0))
    else:
        forma = preset(celda.get('preset', 'E1'))
    if forma is not None and 'angle' in celda:
        forma = forma.rotated(celda['angle'])
    return forma


def _build(datos: dict, raw: dict) -> RunConfig:
    celda = datos.get('cell', {})
    cell = CellSpec(_shape(celda), n_seg=celda.get('n_seg'), h=celda.get('h'), n_layers=celda.get('n_layers'))

    ley = datos.get('law', {})
    eta_0 = ley.get('eta_0', float(get_setting('ETA_0')))
    eta_inf = ley.get('eta_inf', float(get_setting('ETA_INF')))
    if not eta_0 > eta_inf:
        raise ConfigError(f"Se requiere eta_0 > eta_inf (eta_0={eta_0}, eta_inf={eta_inf})")
    law = LawSettings(
        eta_0=eta_0,
        eta_inf=eta_inf,
        lam=ley.get('lambda', float(get_setting('LAMBDA'))),
        r_list=tuple(ley['r_list']) if 'r_list' in ley else (ley.get('r', 2.0),),
        gamma=ley.get('gamma', 1.0),
        delta_reg=ley.get('delta_reg', float(get_setting('DELTA_REG'))),
        family=ley.get('family', True),
    )

    solver = datos.get('solver', {})
    picard = PicardOptions(
        max_iter=solver.get('picard_max_iter'),
        tol_rel=solver.get('picard_tol_rel'),
        relax=solver.get('picard_relax'),
    )

    barridos = datos.get('sweeps', {})
    amplitud = barridos.get('amplitude') or {'start': 0.05, 'stop': 1.0, 'step': 0.05, 'f2': 0.0}
    if 'values' in amplitud:
        valores = tuple(amplitud['values'])
    else:
        valores = amplitude_grid(amplitud.get('start', 0.05), amplitud.get('stop', 1.0), amplitud.get('step', 0.05))
    rotacion = barridos.get('rotation') or {}
    thetas = np.linspace(rotacion.get('theta_min', 0.0), rotacion.get('theta_max', math.pi / 2),
                         rotacion.get('n_theta', 16))
    sweeps = SweepSettings(
        amplitude_values=valores,
        f2=amplitud.get('f2', 0.0),
        theta_values=tuple(float(t) for t in thetas),
        rotation_amplitude=rotacion.get('amplitude', 1.0),
        permeability_angles=tuple(barridos.get('permeability_angles', ())),
    )

    salida = datos.get('output', {})
    output = OutputSettings(
        dir=Path(salida.get('dir') or get_setting('OUTPUT_DIR')),
        write_kkt=salida.get('write_kkt', False),
        write_vtk=salida.get('write_vtk', False),
    )

    validacion = datos.get('validation') or {}
    validation = ValidationSettings(
        fault=validacion.get('fault'),
        channel_h=validacion.get('channel_h', 0.5),
        channel_n_layers=validacion.get('channel_n_layers', 16),
    )

    return RunConfig(
        name=datos.get('name', 'corrida'),
        cell=cell,
        law=law,
        picard=picard,
        saddle_tol=solver.get('saddle_tol', float(get_setting('SADDLE_TOL'))),
        sweeps=sweeps,
        output=output,
        validation=validation,
        threads=datos.get('threads', int(get_setting('THREADS'))),
        tensor_form=solver.get('tensor_form', 'laplacian'),
        raw=raw,
    )


def parse_run_config(data: dict) -> RunConfig:
    """Valida ``data`` (esquema + serializers) y construye el RunConfig."""
    try:
        jsonschema.validate(instance=data, schema=run_config_schema())
    except jsonschema.ValidationError as e:
        ruta = '/'.join(str(p) for p in e.absolute_path) or '<raíz>'
        raise ConfigError(f"Configuración inválida en {ruta}: {e.message}", path=ruta) from None

    serializer = RunConfigSerializer(data=data)
    if not serializer.is_valid():
        raise ConfigError(f"Configuración inválida: {serializer.errors}", errors=serializer.errors)
    config = _build(serializer.validated_data, data)
    logger.debug(f"RunConfig '{config.name}' validado")
    return config


def load_run_config(path=None) -> RunConfig:
    """Lee el archivo JSON ``path``; sin archivo se usa la configuración por defecto."""
    if path is None:
        return parse_run_config({})
    ruta = Path(path)
    if not ruta.is_file() and (CONFIGS_DIR / ruta).is_file():
        ruta = CONFIGS_DIR / ruta
    try:
        with ruta.open(encoding='utf-8') as f:
            data = json.load(f)
    except FileNotFoundError:
        raise ConfigError(f"No existe el archivo de configuración: {ruta}", path=str(ruta)) from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"JSON inválido en {ruta}: {e}", path=str(ruta)) from None
    if not isinstance(data, dict):
        raise ConfigError(f"La configuración debe ser un objeto JSON ({ruta})")
    config = parse_run_config(data)
    logger.info(f"Configuración cargada desde {ruta}")
    return config
