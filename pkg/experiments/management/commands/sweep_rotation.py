"""
Barrido de V para f' = (cos θ, sin θ) sobre θ ∈ [0, π/2].
"""

from experiments.management.base import ExperimentCommand
from experiments.models import ComandoCorrida
from experiments.records import ROTATION_HEADER, write_json, write_records
from experiments.sweeps import regime_summary, sweep_rotation


class Command(ExperimentCommand):
    help = 'Barrido de V al rotar la fuerza unitaria f\' (CSV)'
    comando = ComandoCorrida.SWEEP_ROTATION

    def run(self, config) -> dict:
        registros = sweep_rotation(config)
        salida = config.output.dir
        ruta = write_records(salida / f'{config.name}_sweep_rotation.csv', ROTATION_HEADER, registros)
        write_json(salida / f'{config.name}_sweep_rotation.json',
                   {'config': config.as_dict(), 'rows': [r.as_dict() for r in registros]})

        resumen = regime_summary(registros)
        normas = [r.normV for r in registros if r.ok]
        if len(normas) < len(registros):
            self.stdout.write(self.style.WARNING(f'⚠ {len(registros) - len(normas)} puntos fallidos'))
        if normas:
            self.stdout.write(f'max |V| = {max(normas):.9g}')
        self.stdout.write(f'{len(registros)} filas escritas en {ruta}')
        return {'csv': str(ruta), 'points': resumen, 'max_normV': max(normas) if normas else None}
