"""
Calcula el tensor de permeabilidad 𝒜 (o la tabla 𝒜(θ) para la inclusión girada).
"""

import logging

from fem_stokes.assembly import assemble
from fem_stokes.export import write_kkt, write_vtk
from fem_stokes.solver import solve_saddle
from homogenize.permeability import TENSOR_FORMS, cell_space
from experiments.management.base import ExperimentCommand
from experiments.models import ComandoCorrida
from experiments.records import PERMEABILITY_HEADER, write_csv, write_json
from experiments.sweeps import permeability_rows

logger = logging.getLogger(__name__)


class Command(ExperimentCommand):
    help = 'Calcula el tensor de permeabilidad de la celda (CSV + JSON)'
    comando = ComandoCorrida.PERMEABILITY

    def run(self, config) -> dict:
        filas = permeability_rows(config)
        salida = config.output.dir
        write_csv(salida / f'{config.name}_permeability.csv', PERMEABILITY_HEADER,
                  ([fila[c] for c in PERMEABILITY_HEADER] for fila in filas))
        write_json(salida / f'{config.name}_permeability.json', {'config': config.as_dict(), 'rows': filas})

        for fila in filas:
            self.stdout.write(
                f'θ={fila["theta"]:.6g}: A = [[{fila["A11"]:.9g}, {fila["A12"]:.9g}], '
                f'[{fila["A21"]:.9g}, {fila["A22"]:.9g}]]'
            )
        if config.output.write_kkt or config.output.write_vtk:
            self._export(config)
        return {'rows': filas}

    def _export(self, config):
        """Sistema y solución del problema de celda con fuerza e₁."""
        sistema = assemble(cell_space(config.cell), 1.0, TENSOR_FORMS[config.tensor_form], (1.0, 0.0, 0.0))
        salida = config.output.dir
        if config.output.write_kkt:
            write_kkt(sistema, salida / f'{config.name}_kkt.mtx')
        if config.output.write_vtk:
            write_vtk(solve_saddle(sistema, tol=config.saddle_tol), salida / f'{config.name}_w1.vtk')
        logger.info(f"Exportaciones de {config.name} escritas en {salida}")
