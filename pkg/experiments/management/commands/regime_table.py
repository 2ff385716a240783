"""
Imprime la tabla de regímenes efectivos según (r, γ).
"""

from core.exceptions import ConfigError
from experiments.management.base import ExperimentCommand
from experiments.models import ComandoCorrida
from experiments.records import write_json
from rheology.regimes import TABLE_GAMMA, TABLE_R, regime_table


def _lista(texto):
    try:
        return tuple(float(v) for v in texto.split(','))
    except ValueError:
        raise ConfigError(f"Lista de números inválida: {texto!r}") from None


class Command(ExperimentCommand):
    help = 'Tabla de regímenes de la ley de Darcy efectiva (texto + JSON)'
    comando = ComandoCorrida.REGIME_TABLE

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument(
            '--r-list',
            type=str,
            default=','.join(str(r) for r in TABLE_R),
            help='Exponentes r separados por coma (por defecto 1.7,2.0,2.3)'
        )
        parser.add_argument(
            '--gamma-list',
            type=str,
            default=','.join(str(g) for g in TABLE_GAMMA),
            help='Valores de γ separados por coma (por defecto 0.5,1.0,2.0)'
        )

    def handle(self, *args, **options):
        self._listas = (options['r_list'], options['gamma_list'])
        super().handle(*args, **options)

    def run(self, config) -> dict:
        r_list, gamma_list = (_lista(texto) for texto in self._listas)
        filas = regime_table(r_list, gamma_list,
                             eta_0=config.law.eta_0, eta_inf=config.law.eta_inf, lam=config.law.lam)
        ancho = max(len(f['label']) for f in filas)
        self.stdout.write('γ \\ r'.ljust(8) + ''.join(f'{r:<{ancho + 2}}' for r in r_list))
        for gamma in gamma_list:
            celdas = [f['label'] for f in filas if f['gamma'] == gamma]
            self.stdout.write(f'{gamma:<8}' + ''.join(f'{c:<{ancho + 2}}' for c in celdas))
        write_json(config.output.dir / f'{config.name}_regime_table.json', {'rows': filas})
        return {'rows': filas}
