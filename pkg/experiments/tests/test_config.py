import json
import math
import tempfile
from pathlib import Path

from django.test import SimpleTestCase

from cell_mesh.geometry import PRESETS, InclusionShape
from core.exceptions import ConfigError, InvalidShape
from experiments.config import CONFIGS_DIR, amplitude_grid, load_run_config, parse_resolution, parse_run_config


class RunConfigTests(SimpleTestCase):
    def test_defaults(self):
        config = parse_run_config({})
        self.assertEqual(config.cell.shape, PRESETS['E1'])
        self.assertEqual((config.cell.h, config.cell.n_layers, config.cell.n_seg), (0.08, 8, 64))
        self.assertEqual((config.law.eta_0, config.law.eta_inf), (1.0, 1e-3))
        self.assertEqual(config.law.r_list, (2.0,))
        self.assertEqual(config.threads, 1)
        self.assertEqual(len(config.sweeps.amplitude_values), 20)
        self.assertEqual(config.sweeps.amplitude_values[0], 0.05)
        self.assertEqual(config.sweeps.amplitude_values[-1], 1.0)
        self.assertEqual(len(config.sweeps.theta_values), 16)
        self.assertAlmostEqual(config.sweeps.theta_values[-1], math.pi / 2, places=15)

    def test_preset_with_angle_override(self):
        config = parse_run_config({'cell': {'preset': 'E2', 'angle': math.pi / 8}})
        self.assertEqual(config.cell.shape, InclusionShape.ellipse(0.3, 0.1, angle=math.pi / 8))

    def test_explicit_shape(self):
        config = parse_run_config({'cell': {'shape': {'kind': 'disk', 'radius': 0.2}, 'h': 0.1, 'n_layers': 6}})
        self.assertEqual(config.cell.shape, InclusionShape.disk(0.2))
        self.assertEqual((config.cell.h, config.cell.n_layers), (0.1, 6))
        sin_obstaculo = parse_run_config({'cell': {'shape': None}})
        self.assertIsNone(sin_obstaculo.cell.shape)

    def test_unknown_keys_are_rejected(self):
        for data in ({'extra': 1}, {'law': {'eta0': 1.0}}, {'cell': {'preset': 'E1', 'radio': 0.1}}):
            with self.assertRaises(ConfigError, msg=str(data)):
                parse_run_config(data)

    def test_cross_field_rules(self):
        with self.assertRaises(ConfigError):
            parse_run_config({'law': {'eta_0': 1e-3, 'eta_inf': 1.0}})
        with self.assertRaises(ConfigError):
            parse_run_config({'cell': {'shape': {'kind': 'ellipse', 'semi_major': 0.1, 'semi_minor': 0.3}}})
        with self.assertRaises(ConfigError):
            parse_run_config({'cell': {'preset': 'E1', 'shape': None}})
        with self.assertRaises(ConfigError):
            parse_run_config({'law': {'r': 2.0, 'r_list': [1.7]}})
        with self.assertRaises(ConfigError):
            parse_run_config({'law': {'r': 0.9}})

    def test_degenerate_power_law_is_rejected(self):
        with self.assertRaises(ConfigError):
            parse_run_config({'law': {'r_list': [1.7, 3.0], 'delta_reg': 0.0}})
        with self.assertRaises(ConfigError):
            parse_run_config({'law': {'r': 2.5, 'delta_reg': 0}})
        self.assertEqual(parse_run_config({'law': {'r': 1.7, 'delta_reg': 0.0}}).law.delta_reg, 0.0)
        self.assertEqual(parse_run_config({'law': {'r': 3.0, 'delta_reg': 1e-8}}).law.delta_reg, 1e-8)

    def test_invalid_preset(self):
        with self.assertRaises(ConfigError):
            parse_run_config({'cell': {'preset': 'E9'}})

    def test_schema_and_serializer_errors_share_exit_code(self):
        with self.assertRaises(ConfigError) as ctx:
            parse_run_config({'threads': 0})
        self.assertEqual(ctx.exception.exit_code, 2)

    def test_shape_errors_are_config_errors(self):
        self.assertTrue(issubclass(InvalidShape, ConfigError))

    def test_amplitude_values_and_rotation(self):
        config = parse_run_config({'sweeps': {
            'amplitude': {'values': [0.2, 0.4], 'f2': 0.1},
            'rotation': {'n_theta': 3, 'theta_max': math.pi, 'amplitude': 2.0},
            'permeability_angles': [0.0, 0.5],
        }})
        self.assertEqual(config.sweeps.amplitude_values, (0.2, 0.4))
        self.assertEqual(config.sweeps.f2, 0.1)
        self.assertEqual(config.sweeps.theta_values, (0.0, math.pi / 2, math.pi))
        self.assertEqual(config.sweeps.rotation_amplitude, 2.0)
        self.assertEqual(config.sweeps.permeability_angles, (0.0, 0.5))

    def test_amplitude_grid(self):
        self.assertEqual(amplitude_grid(0.05, 1.0, 0.05)[:3], (0.05, 0.1, 0.15))
        self.assertEqual(amplitude_grid(0.1, 0.1, 0.05), (0.1,))

    def test_overrides(self):
        config = parse_run_config({}).with_overrides(out='/tmp/salida', threads=4, resolution='0.2,4')
        self.assertEqual(config.output.dir, Path('/tmp/salida'))
        self.assertEqual(config.threads, 4)
        self.assertEqual((config.cell.h, config.cell.n_layers), (0.2, 4))
        self.assertEqual(config.cell.shape, PRESETS['E1'])

    def test_parse_resolution(self):
        self.assertEqual(parse_resolution('0.08,8'), (0.08, 8))
        for texto in ('0.08', 'a,b', '0.1,2', '-1,8'):
            with self.assertRaises(ConfigError, msg=texto):
                parse_resolution(texto)

    def test_load_file_and_errors(self):
        with tempfile.TemporaryDirectory() as tmp:
            ruta = Path(tmp) / 'c.json'
            ruta.write_text(json.dumps({'name': 'prueba', 'cell': {'preset': 'E4'}}), encoding='utf-8')
            config = load_run_config(ruta)
            self.assertEqual(config.name, 'prueba')
            self.assertEqual(config.cell.shape, PRESETS['E4'])
            roto = Path(tmp) / 'roto.json'
            roto.write_text('{"name": ', encoding='utf-8')
            with self.assertRaises(ConfigError):
                load_run_config(roto)
            with self.assertRaises(ConfigError):
                load_run_config(Path(tmp) / 'no_existe.json')

    def test_shipped_configs_are_valid(self):
        nombres = sorted(p.name for p in CONFIGS_DIR.glob('*.json'))
        self.assertIn('e1.json', nombres)
        for nombre in nombres:
            config = load_run_config(nombre)
            self.assertEqual(config.name, Path(nombre).stem)

    def test_tensor_form(self):
        self.assertEqual(parse_run_config({}).tensor_form, 'laplacian')
        self.assertEqual(load_run_config('e2.json').tensor_form, 'symmetric')
        self.assertEqual(load_run_config('e2_rotated.json').as_dict()['solver']['tensor_form'], 'symmetric')
        with self.assertRaises(ConfigError):
            parse_run_config({'solver': {'tensor_form': 'deviatoric'}})

    def test_as_dict_is_json_ready(self):
        texto = json.dumps(parse_run_config({'cell': {'preset': 'E2'}}).as_dict())
        self.assertIn('"ELLIPSE"', texto)
