"""
Ejecuta la suite de validación contra el oráculo de canal; sale con código 4 si algo falla.
"""

from experiments.management.base import ExperimentCommand
from experiments.models import ComandoCorrida
from experiments.records import write_json
from experiments.validation import run_validation


class Command(ExperimentCommand):
    help = 'Suite de validación (oráculo de canal y propiedades); código de salida 4 ante fallos'
    comando = ComandoCorrida.VALIDATE

    def run(self, config) -> dict:
        reporte = run_validation(config)
        write_json(config.output.dir / f'{config.name}_validation.json', reporte.as_dict())
        for check in reporte.checks:
            linea = f'{check.name}: {check.value} (tol {check.tolerance}) {check.detail}'.rstrip()
            if check.passed:
                self.stdout.write(self.style.SUCCESS(f'  ✓ {linea}'))
            else:
                self.stdout.write(self.style.ERROR(f'  ✗ {linea}'))
        reporte.raise_for_failures()
        return reporte.as_dict()
