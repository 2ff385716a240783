"""
Barrido de la velocidad de filtración V en función de la amplitud f₁.
"""

from experiments.management.base import ExperimentCommand
from experiments.models import ComandoCorrida
from experiments.records import AMPLITUDE_HEADER, write_json, write_records
from experiments.sweeps import regime_summary, sweep_amplitude


class Command(ExperimentCommand):
    help = 'Barrido de V₁(f₁) para cada r de la configuración (CSV)'
    comando = ComandoCorrida.SWEEP_AMPLITUDE

    def run(self, config) -> dict:
        registros = sweep_amplitude(config)
        salida = config.output.dir
        ruta = write_records(salida / f'{config.name}_sweep_amplitude.csv', AMPLITUDE_HEADER, registros)
        write_json(salida / f'{config.name}_sweep_amplitude.json',
                   {'config': config.as_dict(), 'rows': [r.as_dict() for r in registros]})

        resumen = regime_summary(registros)
        fallidos = sum(v['failed'] for v in resumen.values())
        if fallidos:
            self.stdout.write(self.style.WARNING(f'⚠ {fallidos} puntos fallidos (ver columna error)'))
        self.stdout.write(f'{len(registros)} filas escritas en {ruta}')
        return {'csv': str(ruta), 'points': resumen}
