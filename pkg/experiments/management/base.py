"""
Base común de los comandos de experimentos: flags compartidos, registro de
corridas y traducción de errores a códigos de salida.
"""

import logging
import time

from django.core.management.base import BaseCommand, CommandError

from core.exceptions import HomogenizationError
from experiments.config import load_run_config
from experiments.models import Corrida

logger = logging.getLogger(__name__)


class ExperimentCommand(BaseCommand):
    """Subclases definen ``comando`` y ``run(config) -> dict``."""

    comando = None

    def add_arguments(self, parser):
        parser.add_argument(
            '--config',
            type=str,
            help='Archivo JSON RunConfig (ruta o nombre dentro de experiments/configs)'
        )
        parser.add_argument(
            '--out',
            type=str,
            help='Directorio de salida (por defecto output.dir o HOMOGENIZACION["OUTPUT_DIR"])'
        )
        parser.add_argument(
            '--threads',
            type=int,
            help='Número de hilos para los puntos de un barrido (por defecto 1)'
        )
        parser.add_argument(
            '--resolution',
            type=str,
            help='Resolución de la malla como h,n_layers (por ejemplo 0.08,8)'
        )
        parser.add_argument(
            '--registrar',
            action='store_true',
            help='Registrar la corrida en la base de datos'
        )

    def run(self, config) -> dict:
        raise NotImplementedError

    def handle(self, *args, **options):
        inicio = time.perf_counter()
        corrida = None
        try:
            config = load_run_config(options.get('config')).with_overrides(
                out=options.get('out'),
                threads=options.get('threads'),
                resolution=options.get('resolution'),
            )
            if options.get('registrar'):
                corrida = Corrida.objects.create(
                    comando=self.comando,
                    config=config.as_dict(),
                    output_dir=str(config.output.dir),
                )
            resumen = self.run(config)
        except HomogenizationError as e:
            duracion = time.perf_counter() - inicio
            logger.error(f"{self.comando}: {type(e).__name__}: {e.message}")
            if corrida is not None:
                corrida.finalizar(e.exit_code, {'error': e.as_dict()}, duracion)
            raise CommandError(f"{type(e).__name__}: {e.message}", returncode=e.exit_code) from e

        duracion = time.perf_counter() - inicio
        if corrida is not None:
            corrida.finalizar(0, resumen, duracion)
            self.stdout.write(f'Corrida #{corrida.pk} registrada')
        logger.info(f"{self.comando} terminado en {duracion:.1f}s")
        self.stdout.write(self.style.SUCCESS(f'✓ {self.comando} completado en {duracion:.1f}s'))
