"""
Genera la malla tetraédrica de la celda, la exporta en MSH 2.2 y escribe el reporte de calidad.
"""

import logging

from cell_mesh.export import write_msh
from cell_mesh.extrusion import build_cell_mesh
from experiments.management.base import ExperimentCommand
from experiments.models import ComandoCorrida
from experiments.records import write_json

logger = logging.getLogger(__name__)


class Command(ExperimentCommand):
    help = 'Construye la malla de la celda Z_f (MSH 2.2 + reporte de calidad)'
    comando = ComandoCorrida.MESH

    def run(self, config) -> dict:
        malla = build_cell_mesh(config.cell)
        reporte = malla.quality_report()
        salida = config.output.dir
        ruta_msh = write_msh(malla, salida / f'{config.name}_mesh.msh')
        write_json(salida / f'{config.name}_mesh.json', {'config': config.as_dict(), 'report': reporte})

        self.stdout.write(f'Malla: {reporte["n_vertices"]} vértices, {reporte["n_tets"]} tetraedros')
        self.stdout.write(f'Volumen: {reporte["volume"]:.9g}  (área del obstáculo {reporte["obstacle_area"]:.9g})')
        self.stdout.write(f'Aristas: [{reporte["min_edge"]:.4g}, {reporte["max_edge"]:.4g}]')
        for tag, cantidad in reporte['facet_counts'].items():
            self.stdout.write(f'  {tag}: {cantidad}')
        logger.info(f"Malla escrita en {ruta_msh}")
        return {'report': reporte, 'msh': str(ruta_msh)}
