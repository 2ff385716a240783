import json
import tempfile
from io import StringIO
from pathlib import Path

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import TestCase, tag

from experiments.models import Corrida, EstadoCorrida


class CommandTestCase(TestCase):
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()

    def config_file(self, data: dict) -> str:
        ruta = self.tmp / f"{data.get('name', 'corrida')}.json"
        ruta.write_text(json.dumps(data), encoding='utf-8')
        return str(ruta)

    def call(self, nombre, *args, **opciones):
        salida = StringIO()
        call_command(nombre, *args, stdout=salida, out=str(self.tmp / 'out'), **opciones)
        return salida.getvalue()


class MeshCommandTests(CommandTestCase):
    def test_empty_inclusion_has_unit_volume(self):
        config = self.config_file({'name': 'vacia', 'cell': {'preset': 'NONE', 'h': 0.25, 'n_layers': 4}})
        texto = self.call('mesh', config=config)
        self.assertIn('Volumen: 1 ', texto)
        reporte = json.loads((self.tmp / 'out' / 'vacia_mesh.json').read_text(encoding='utf-8'))['report']
        self.assertAlmostEqual(reporte['volume'], 1.0, places=12)
        self.assertEqual(reporte['facet_counts']['OBSTACLE'], 0)
        msh = (self.tmp / 'out' / 'vacia_mesh.msh').read_text(encoding='utf-8')
        self.assertTrue(msh.startswith('$MeshFormat\n2.2'))

    def test_resolution_flag(self):
        config = self.config_file({'name': 'disco', 'cell': {'preset': 'E1'}})
        self.call('mesh', config=config, resolution='0.2,4')
        reporte = json.loads((self.tmp / 'out' / 'disco_mesh.json').read_text(encoding='utf-8'))
        self.assertEqual(reporte['config']['cell']['h'], 0.2)
        self.assertEqual(reporte['config']['cell']['n_layers'], 4)

    def test_clearance_violation_exits_with_2(self):
        config = self.config_file({'name': 'grande', 'cell': {'shape': {'kind': 'disk', 'radius': 0.5}}})
        with self.assertRaises(CommandError) as ctx:
            self.call('mesh', config=config)
        self.assertEqual(ctx.exception.returncode, 2)
        self.assertIn('ClearanceViolation', str(ctx.exception))

    def test_invalid_config_exits_with_2(self):
        config = self.config_file({'name': 'mala', 'clave_desconocida': True})
        with self.assertRaises(CommandError) as ctx:
            self.call('mesh', config=config)
        self.assertEqual(ctx.exception.returncode, 2)


class PermeabilityCommandTests(CommandTestCase):
    def test_channel_tensor_csv(self):
        config = self.config_file({'name': 'canal', 'cell': {'preset': 'NONE', 'h': 0.25, 'n_layers': 4},
                                   'output': {'write_kkt': True, 'write_vtk': True}})
        self.call('permeability', config=config)
        lineas = (self.tmp / 'out' / 'canal_permeability.csv').read_text(encoding='utf-8').splitlines()
        self.assertEqual(lineas[0], 'theta,A11,A12,A21,A22,eig_min,eig_max,n_tets')
        self.assertEqual(len(lineas), 2)
        A11 = float(lineas[1].split(',')[1])
        self.assertAlmostEqual(A11 * 12.0, 1.0, delta=0.01)
        self.assertTrue((self.tmp / 'out' / 'canal_kkt.mtx').exists())
        self.assertTrue((self.tmp / 'out' / 'canal_kkt_rhs.mtx').exists())
        self.assertTrue((self.tmp / 'out' / 'canal_w1.vtk').exists())

    def test_rotation_table_requires_inclusion(self):
        config = self.config_file({'name': 'sin', 'cell': {'preset': 'NONE', 'h': 0.25, 'n_layers': 4},
                                   'sweeps': {'permeability_angles': [0.0]}})
        with self.assertRaises(CommandError) as ctx:
            self.call('permeability', config=config)
        self.assertEqual(ctx.exception.returncode, 2)


class SweepCommandTests(CommandTestCase):
    def test_amplitude_sweep_is_deterministic(self):
        datos = {'name': 'lineal', 'cell': {'preset': 'NONE', 'h': 0.5, 'n_layers': 4},
                 'law': {'r_list': [1.7, 2.3], 'gamma': 0.5},
                 'sweeps': {'amplitude': {'values': [0.5, 1.0]}}}
        config = self.config_file(datos)
        self.call('sweep_amplitude', config=config)
        primera = (self.tmp / 'out' / 'lineal_sweep_amplitude.csv').read_bytes()
        self.call('sweep_amplitude', config=config, threads=2)
        segunda = (self.tmp / 'out' / 'lineal_sweep_amplitude.csv').read_bytes()
        self.assertEqual(primera, segunda)
        lineas = primera.decode('utf-8').splitlines()
        self.assertEqual(lineas[0], 'r,f1,V1,V2,iters,resid,error')
        self.assertEqual(len(lineas), 5)

    def test_rotation_sweep_header(self):
        config = self.config_file({'name': 'rot', 'cell': {'preset': 'NONE', 'h': 0.5, 'n_layers': 4},
                                   'law': {'r': 2.0, 'gamma': 0.5}, 'sweeps': {'rotation': {'n_theta': 4}}})
        texto = self.call('sweep_rotation', config=config)
        self.assertIn('max |V|', texto)
        lineas = (self.tmp / 'out' / 'rot_sweep_rotation.csv').read_text(encoding='utf-8').splitlines()
        self.assertEqual(lineas[0], 'r,theta,f1,f2,V1,V2,normV,iters,resid,error')
        self.assertEqual(len(lineas), 5)


class RegimeTableCommandTests(CommandTestCase):
    def test_table_text_and_json(self):
        texto = self.call('regime_table')
        self.assertIn("Non-linear 2D Darcy's law (power law type)", texto)
        self.assertIn("Linear 2D Darcy's law (viscosity η∞)", texto)
        filas = json.loads((self.tmp / 'out' / 'corrida_regime_table.json').read_text(encoding='utf-8'))['rows']
        self.assertEqual(len(filas), 9)

    def test_custom_lists(self):
        self.call('regime_table', r_list='2.6', gamma_list='1.0')
        filas = json.loads((self.tmp / 'out' / 'corrida_regime_table.json').read_text(encoding='utf-8'))['rows']
        self.assertEqual(filas, [{'gamma': 1.0, 'r': 2.6, 'regime': 'CARREAU_DARCY',
                                  'label': "Non-linear 2D Darcy's law (Carreau type)"}])

    def test_bad_list_exits_with_2(self):
        with self.assertRaises(CommandError) as ctx:
            self.call('regime_table', r_list='dos')
        self.assertEqual(ctx.exception.returncode, 2)


class RegistrarTests(CommandTestCase):
    def test_successful_run_is_recorded(self):
        self.call('regime_table', registrar=True)
        corrida = Corrida.objects.get()
        self.assertEqual(corrida.comando, 'regime_table')
        self.assertEqual(corrida.estado, EstadoCorrida.EXITOSA)
        self.assertEqual(corrida.exit_code, 0)
        self.assertEqual(len(corrida.resumen['rows']), 9)
        self.assertIsNotNone(corrida.duracion)

    def test_failed_run_is_recorded(self):
        config = self.config_file({'name': 'grande', 'cell': {'shape': {'kind': 'disk', 'radius': 0.5}}})
        with self.assertRaises(CommandError):
            self.call('mesh', config=config, registrar=True)
        corrida = Corrida.objects.get()
        self.assertEqual(corrida.estado, EstadoCorrida.FALLIDA)
        self.assertEqual(corrida.exit_code, 2)
        self.assertEqual(corrida.resumen['error']['error'], 'ClearanceViolation')


@tag('lento')
class ValidateCommandTests(CommandTestCase):
    def test_default_suite_passes(self):
        texto = self.call('validate')
        self.assertNotIn('✗', texto)
        reporte = json.loads((self.tmp / 'out' / 'corrida_validation.json').read_text(encoding='utf-8'))
        self.assertTrue(reporte['passed'])

    def test_injected_fault_exits_with_4(self):
        config = self.config_file({'name': 'falla', 'validation': {'fault': 'prefactor'}})
        with self.assertRaises(CommandError) as ctx:
            self.call('validate', config=config)
        self.assertEqual(ctx.exception.returncode, 4)
        reporte = json.loads((self.tmp / 'out' / 'falla_validation.json').read_text(encoding='utf-8'))
        fallidas = [c['name'] for c in reporte['checks'] if not c['passed']]
        self.assertEqual(fallidas, ['power_darcy_prefactor'])
