import math
import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase, tag

from core.exceptions import NoConvergence
from experiments.config import parse_run_config
from experiments.records import (
    AMPLITUDE_HEADER, PERMEABILITY_HEADER, ROTATION_HEADER, SweepRecord, format_value, write_csv, write_records,
)
from experiments.sweeps import (
    curves_by_r, evaluate_point, find_crossing, ordered_map, permeability_rows, sweep_amplitude, sweep_rotation,
)
from homogenize.permeability import permeability_tensor

CANAL = {'preset': 'NONE', 'h': 0.5, 'n_layers': 16}


class RecordTests(SimpleTestCase):
    def test_headers_are_fixed(self):
        self.assertEqual(AMPLITUDE_HEADER, ('r', 'f1', 'V1', 'V2', 'iters', 'resid', 'error'))
        self.assertEqual(ROTATION_HEADER, ('r', 'theta', 'f1', 'f2', 'V1', 'V2', 'normV', 'iters', 'resid', 'error'))
        self.assertEqual(PERMEABILITY_HEADER, ('theta', 'A11', 'A12', 'A21', 'A22', 'eig_min', 'eig_max', 'n_tets'))

    def test_format_value(self):
        self.assertEqual(format_value(1.0 / 12.0), '0.0833333333')
        self.assertEqual(format_value(0.0697955), '0.0697955')
        self.assertEqual(format_value(12), '12')
        self.assertEqual(format_value(None), '')
        self.assertEqual(format_value(float('nan')), '')
        self.assertEqual(format_value(np.float64(2.5)), '2.5')

    def test_record_norm(self):
        registro = SweepRecord(r=2.0, f1=1.0, f2=0.0, V1=3.0, V2=4.0)
        self.assertEqual(registro.normV, 5.0)
        self.assertTrue(registro.ok)
        fallido = SweepRecord(r=2.0, f1=1.0, f2=0.0, error='NoConvergence: x')
        self.assertIsNone(fallido.normV)
        self.assertFalse(fallido.ok)

    def test_csv_layout(self):
        with tempfile.TemporaryDirectory() as tmp:
            registros = [SweepRecord(r=1.7, f1=0.5, f2=0.0, V1=0.1, V2=0.0, iters=7, resid=1e-12),
                         SweepRecord(r=1.7, f1=1.0, f2=0.0, error='SolverBreakdown: residuo')]
            ruta = write_records(Path(tmp) / 'sub' / 'a.csv', AMPLITUDE_HEADER, registros)
            contenido = ruta.read_bytes()
            self.assertNotIn(b'\r', contenido)
            lineas = contenido.decode('utf-8').splitlines()
            self.assertEqual(lineas[0], 'r,f1,V1,V2,iters,resid,error')
            self.assertEqual(lineas[1], '1.7,0.5,0.1,0,7,1e-12,')
            self.assertEqual(lineas[2], '1.7,1,,,,,SolverBreakdown: residuo')

    def test_write_csv_rows(self):
        with tempfile.TemporaryDirectory() as tmp:
            ruta = write_csv(Path(tmp) / 'b.csv', ('x', 'y'), [[1.0, 2], [0.5, None]])
            self.assertEqual(ruta.read_text(encoding='utf-8'), 'x,y\n1,2\n0.5,\n')


class OrderedMapTests(SimpleTestCase):
    def test_order_is_preserved(self):
        items = list(range(12))
        self.assertEqual(ordered_map(lambda x: x * x, items, threads=4), [x * x for x in items])
        self.assertEqual(ordered_map(lambda x: -x, items, threads=1), [-x for x in items])


class CrossingTests(SimpleTestCase):
    def test_single_crossing(self):
        x = np.linspace(0.0, 1.0, 11)
        self.assertAlmostEqual(find_crossing(x, x, 0.35 * np.ones_like(x)), 0.35, places=12)

    def test_no_or_multiple_crossings(self):
        x = np.linspace(0.0, 1.0, 11)
        self.assertIsNone(find_crossing(x, x + 1.0, x))
        self.assertIsNone(find_crossing(x, np.sin(8 * x), np.zeros_like(x) + 0.1))

    def test_exact_zero_on_grid(self):
        x = np.array([0.0, 0.5, 1.0])
        self.assertEqual(find_crossing(x, [-1.0, 0.0, 1.0], [0.0, 0.0, 0.0]), 0.5)


class _LeyQueFalla:
    r = 1.7

    def sample(self, xi):
        raise NoConvergence("Picard sin convergencia", history=[1e-3, 1e-3])


class EvaluatePointTests(SimpleTestCase):
    def test_solver_failure_is_recorded_in_row(self):
        registro = evaluate_point(_LeyQueFalla(), 0.5, 0.0)
        self.assertFalse(registro.ok)
        self.assertTrue(registro.error.startswith('NoConvergence'))
        self.assertIsNone(registro.V1)


class LinearSweepTests(SimpleTestCase):
    """Barridos en el régimen lineal (γ < 1) sobre el canal sin obstáculo."""

    def config(self, **extra):
        datos = {'cell': CANAL, 'law': {'r': 1.7, 'gamma': 0.5},
                 'sweeps': {'amplitude': {'values': [0.25, 0.5, 1.0]}, 'rotation': {'n_theta': 3}}}
        datos.update(extra)
        return parse_run_config(datos)

    def test_amplitude_is_linear(self):
        registros = sweep_amplitude(self.config())
        V1 = np.array([r.V1 for r in registros])
        np.testing.assert_allclose(V1 / [0.25, 0.5, 1.0], V1[-1], rtol=1e-8)
        self.assertAlmostEqual(V1[-1] * 12.0, 1.0, delta=0.01)
        self.assertTrue(all(r.iters == 0 and r.ok for r in registros))

    def test_rotation_endpoints(self):
        config = self.config()
        tensor = permeability_tensor(config.cell, tol=config.saddle_tol)
        registros = sweep_rotation(config)
        self.assertEqual([r.theta for r in registros], list(config.sweeps.theta_values))
        np.testing.assert_allclose([registros[0].V1, registros[0].V2], tensor.matrix[:, 0], atol=1e-14)
        np.testing.assert_allclose([registros[-1].V1, registros[-1].V2], tensor.matrix[:, 1], atol=1e-12)
        for r in registros:
            self.assertAlmostEqual(r.normV, math.hypot(r.V1, r.V2))

    def test_eta_inf_regime_scales_velocity(self):
        config = self.config(law={'r': 1.7, 'gamma': 2.0})
        V1 = sweep_amplitude(config)[-1].V1
        self.assertAlmostEqual(V1 * 12.0 * 1e-3, 1.0, delta=0.01)

    def test_threads_do_not_change_output(self):
        with tempfile.TemporaryDirectory() as tmp:
            a = write_records(Path(tmp) / 'a.csv', AMPLITUDE_HEADER, sweep_amplitude(self.config()))
            b = write_records(Path(tmp) / 'b.csv', AMPLITUDE_HEADER, sweep_amplitude(self.config(threads=3)))
            self.assertEqual(a.read_bytes(), b.read_bytes())

    def test_multi_r_sweep_groups_rows(self):
        registros = sweep_amplitude(self.config(law={'r_list': [1.7, 2.3], 'gamma': 0.5}))
        self.assertEqual([r.r for r in registros], [1.7] * 3 + [2.3] * 3)
        curvas = curves_by_r(registros)
        np.testing.assert_allclose(curvas[1.7][1], curvas[2.3][1])


class PermeabilityRowsTests(SimpleTestCase):
    def test_rows_for_rotated_inclusion(self):
        config = parse_run_config({'cell': {'preset': 'E2', 'h': 0.1, 'n_layers': 4},
                                   'sweeps': {'permeability_angles': [0.0, math.pi / 2]}})
        filas = permeability_rows(config)
        self.assertEqual(len(filas), 2)
        self.assertAlmostEqual(filas[1]['A11'] / filas[0]['A22'], 1.0, delta=0.03)
        self.assertEqual(set(PERMEABILITY_HEADER) - set(filas[0]), set())


@tag('lento')
class AcceptanceSweepTests(SimpleTestCase):
    """Barridos de referencia a la resolución por defecto."""

    def test_carreau_family_ordering_and_curvature(self):
        config = parse_run_config({'cell': {'preset': 'E1'},
                                   'law': {'lambda': 100.0, 'r_list': [1.7, 2.0, 2.3, 2.6], 'gamma': 1.0}})
        registros = sweep_amplitude(config)
        self.assertTrue(all(r.ok for r in registros))
        curvas = curves_by_r(registros)
        finales = [curvas[r][1][-1] for r in (1.7, 2.0, 2.3, 2.6)]
        self.assertTrue(all(a > b for a, b in zip(finales, finales[1:])), msg=str(finales))
        self.assertTrue(np.all(np.diff(curvas[1.7][1], 2) > 0))
        self.assertTrue(np.all(np.diff(curvas[2.6][1], 2) < 0))

    def test_power_law_crossing(self):
        config = parse_run_config({'cell': {'preset': 'E1'},
                                   'law': {'lambda': 100.0, 'r_list': [2.0, 2.3], 'gamma': 2.0, 'delta_reg': 1e-8}})
        curvas = curves_by_r(sweep_amplitude(config))
        cruce = find_crossing(curvas[2.0][0], curvas[2.0][1], curvas[2.3][1])
        self.assertIsNotNone(cruce)
        self.assertTrue(0.2 < cruce < 0.6, msg=str(cruce))

    def test_rotation_maxima(self):
        config = parse_run_config({'cell': {'preset': 'E2'},
                                   'law': {'lambda': 100.0, 'r_list': [1.7, 2.6], 'gamma': 1.0}})
        registros = sweep_rotation(config)
        maximo = {r: max(x.normV for x in registros if x.r == r) for r in (1.7, 2.6)}
        self.assertLess(maximo[2.6], maximo[1.7])
