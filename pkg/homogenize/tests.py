import math

import numpy as np
from django.test import SimpleTestCase, tag

from cell_mesh.geometry import PRESETS, CellSpec
from channel_oracle.oracle import channel_flux, channel_flux_closed_power
from core.exceptions import ConfigError, InvalidLaw
from fem_stokes.assembly import GradientForm
from homogenize.effective import EffectiveLaw, darcy_velocity, form_factor_report
from homogenize.permeability import (
    PermeabilityOperator, PermeabilityTensor, permeability_operator, permeability_tensor,
    rotated_permeability_table,
)
from rheology.laws import Carreau, Newtonian, PowerLaw, conjugate_exponent
from rheology.regimes import DarcyRegime, regime_select

# Canal: la resolución lateral no influye, la vertical sí.
CANAL = CellSpec(None, h=0.5, n_layers=16)
GRUESA = dict(h=0.1, n_layers=4)
SIMETRICA = GradientForm.SYMMETRIC_GRADIENT


def celda(nombre, **resolucion):
    return CellSpec(PRESETS[nombre], **(resolucion or GRUESA))


class PermeabilityTensorTests(SimpleTestCase):
    def test_no_obstacle_is_poiseuille(self):
        tensor = permeability_tensor(CellSpec(None, h=0.25, n_layers=4))
        np.testing.assert_allclose(np.diag(tensor.matrix), 1.0 / 12.0, rtol=1e-2)
        self.assertLessEqual(abs(tensor.matrix[0, 1]), 1e-10)

    def test_laplacian_form_factors_only_the_scalar_block(self):
        tensor = permeability_tensor(celda('E1'))
        self.assertEqual(tensor.diagnostics['form'], 'FULL_GRADIENT')
        self.assertEqual(tensor.diagnostics['factor_order'] * 3, tensor.diagnostics['n_velocity_dofs'])
        self.assertLess(tensor.diagnostics['elapsed'], 30.0)
        self.assertTrue(all(n < 200 for n in tensor.diagnostics['schur_iterations']))

    def test_symmetric_form_doubles_the_tensor(self):
        laplaciana = permeability_tensor(celda('E2'))
        simetrica = permeability_tensor(celda('E2'), form=SIMETRICA)
        self.assertEqual(simetrica.diagnostics['factor_order'], simetrica.diagnostics['n_velocity_dofs'])
        np.testing.assert_allclose(np.diag(simetrica.matrix), 2.0 * np.diag(laplaciana.matrix), rtol=0.05)
        self.assertLessEqual(simetrica.symmetry_defect, 1e-8)

    def test_reciprocity_and_definiteness(self):
        for nombre in ('E1', 'E2', 'E4'):
            tensor = permeability_tensor(celda(nombre))
            self.assertLessEqual(tensor.symmetry_defect, 1e-8, msg=nombre)
            self.assertTrue(tensor.is_positive_definite, msg=nombre)

    def test_obstacle_monotonicity(self):
        libre = permeability_tensor(CellSpec(None, **GRUESA)).matrix[0, 0]
        e1 = permeability_tensor(celda('E1')).matrix[0, 0]
        e4 = permeability_tensor(celda('E4')).matrix[0, 0]
        self.assertGreater(libre, e1)
        self.assertGreater(e1, e4)

    def test_quarter_turn_swaps_diagonal(self):
        e2 = permeability_tensor(celda('E2'))
        e3 = permeability_tensor(celda('E3'))
        np.testing.assert_allclose(e3.matrix, e2.rotated(math.pi / 2).matrix, rtol=0.03, atol=1e-4)
        self.assertAlmostEqual(e3.matrix[0, 0] / e2.matrix[1, 1], 1.0, delta=0.03)

    def test_rotated_table_rows(self):
        filas = rotated_permeability_table(celda('E2'), [0.0, math.pi / 4])
        self.assertEqual([f['theta'] for f in filas], [0.0, math.pi / 4])
        self.assertGreater(filas[1]['A12'], 0.0)
        self.assertAlmostEqual(filas[1]['A11'] / filas[1]['A22'], 1.0, delta=0.02)

    def test_rotated_table_requires_inclusion(self):
        with self.assertRaises(ConfigError):
            rotated_permeability_table(CellSpec(None, **GRUESA), [0.0])


class PermeabilityOperatorTests(SimpleTestCase):
    def test_zero_forcing(self):
        muestra = permeability_operator(CANAL, Carreau(1.0, 1e-3, 10.0, 1.7), (0.0, 0.0))
        np.testing.assert_array_equal(muestra.U, [0.0, 0.0])

    def test_requires_nonlinear_law(self):
        with self.assertRaises(ConfigError):
            PermeabilityOperator(CANAL, Newtonian(1.0))

    def test_unregularized_shear_thickening_power_law_is_rejected(self):
        with self.assertRaises(InvalidLaw):
            PermeabilityOperator(CANAL, PowerLaw(1.0, 3.0, 0.0))
        PermeabilityOperator(CANAL, PowerLaw(1.0, 3.0, 1e-8))

    def test_power_law_channel(self):
        muestra = permeability_operator(CANAL, PowerLaw(1.0, 3.0, 1e-8), (1.0, 0.0))
        self.assertAlmostEqual(muestra.U[0] / 0.23784, 1.0, delta=0.02)
        self.assertLessEqual(abs(muestra.U[1]), 1e-8)
        self.assertTrue(muestra.w3_ok)

    def test_carreau_newtonian_limit(self):
        muestra = permeability_operator(CANAL, Carreau(1.0, 1e-3, 1e-6, 1.7), (1.0, 0.0))
        self.assertAlmostEqual(muestra.U[0] * 6.0, 1.0, delta=0.02)

    def test_carreau_matches_channel_oracle(self):
        for lam in (1.0, 100.0):
            for r in (1.7, 2.6):
                ley = Carreau(1.0, 1e-3, lam, r)
                for xi in (0.1, 1.0):
                    U = permeability_operator(CANAL, ley, (xi, 0.0)).U[0]
                    referencia = channel_flux(ley, xi)
                    self.assertLess(abs(U - referencia) / referencia, 0.02, msg=f"lam={lam} r={r} xi={xi}")

    def test_power_law_channel_closed_form(self):
        for r in (2.3, 3.0):
            U = permeability_operator(CANAL, PowerLaw(1.0, r, 1e-8), (1.0, 0.0)).U[0]
            self.assertLess(abs(U / channel_flux_closed_power(r, 1.0) - 1.0), 0.02, msg=f"r={r}")

    def test_power_law_homogeneity(self):
        r = 3.0
        operador = PermeabilityOperator(CANAL, PowerLaw(1.0, r, 1e-10))
        base = operador((0.6, 0.3)).U
        for t in (2.0, 10.0):
            escalado = operador((0.6 * t, 0.3 * t)).U
            np.testing.assert_allclose(escalado, t ** (conjugate_exponent(r) - 1.0) * base, rtol=0.01)

    def test_monotonicity(self):
        operador = PermeabilityOperator(CANAL, Carreau(1.0, 1e-3, 10.0, 1.7))
        angulos = np.linspace(0.0, 2 * math.pi, 10, endpoint=False)
        for k, a in enumerate(angulos):
            xi1 = np.array([math.cos(a), math.sin(a)]) * (0.2 + 0.1 * k)
            xi2 = np.array([math.cos(a + 1.0), math.sin(a + 1.0)]) * (1.0 - 0.05 * k)
            producto = (operador(xi1).U - operador(xi2).U) @ (xi1 - xi2)
            self.assertGreater(producto, 0.0)


class DarcyVelocityTests(SimpleTestCase):
    def test_linear(self):
        tipo = regime_select(2.0, 0.5)
        V = darcy_velocity(tipo, (1.0, 0.0), PermeabilityTensor(np.eye(2) / 12.0))
        np.testing.assert_allclose(V, [1.0 / 12.0, 0.0, 0.0])

    def test_linear_eta_inf(self):
        tipo = regime_select(1.7, 2.0)
        V = darcy_velocity(tipo, (0.0, 2.0), PermeabilityTensor(np.eye(2) / 12.0))
        np.testing.assert_allclose(V, [0.0, 2.0 / 12.0 / 1e-3, 0.0])

    def test_power_prefactor_is_applied(self):
        tipo = regime_select(2.3, 2.0, eta_0=1.0, eta_inf=1e-3, lam=1.0)
        self.assertAlmostEqual(tipo.prefactor, 1.00077, places=5)
        operador = PermeabilityOperator(CANAL, PowerLaw(1.0, 2.3, 1e-8))
        V = darcy_velocity(tipo, (1.0, 0.0), operador)
        np.testing.assert_allclose(V[:2], tipo.prefactor * operador((1.0, 0.0)).U, rtol=1e-12)
        self.assertEqual(V[2], 0.0)

    def test_data_must_match_kind(self):
        with self.assertRaises(ConfigError):
            darcy_velocity(regime_select(2.0, 0.5), (1.0, 0.0), PermeabilityOperator(CANAL, PowerLaw(1.0, 3.0)))

    def test_effective_law_build(self):
        ley = EffectiveLaw.build(CANAL, 1.7, 1.0, lam=10.0)
        self.assertEqual(ley.kind.regime, DarcyRegime.CARREAU)
        V = ley.velocity((0.5, 0.0))
        referencia = channel_flux(Carreau(1.0, 1e-3, 10.0, 1.7), 0.5)
        self.assertLess(abs(V[0] - referencia) / referencia, 0.02)
        self.assertEqual(V[2], 0.0)

    def test_family_keeps_newtonian_member_on_cell_operator(self):
        carreau = EffectiveLaw.build(CANAL, 2.0, 1.0, family=True)
        self.assertEqual(carreau.kind.regime, DarcyRegime.CARREAU)
        self.assertAlmostEqual(carreau.velocity((1.0, 0.0))[0] * 6.0, 1.0, delta=0.02)
        potencia = EffectiveLaw.build(CANAL, 2.0, 2.0, lam=100.0, family=True)
        self.assertEqual(potencia.kind.regime, DarcyRegime.POWER)
        self.assertAlmostEqual(potencia.kind.prefactor, 1.0 / 0.999, places=12)
        lineal = EffectiveLaw.build(CANAL, 2.0, 1.0)
        self.assertEqual(lineal.kind.regime, DarcyRegime.LINEAR)

    def test_family_critical_gamma_uses_regime_tolerance(self):
        for gamma in (1.0 - 1e-14, 1.0 + 1e-14):
            ley = EffectiveLaw.build(CANAL, 2.0, gamma, family=True)
            self.assertEqual(ley.kind.regime, DarcyRegime.CARREAU)
        self.assertEqual(regime_select(1.7, 1.0 + 1e-14).regime, DarcyRegime.CARREAU)

    def test_form_factor_is_two(self):
        reporte = form_factor_report(CANAL)
        self.assertAlmostEqual(reporte['ratio'], 2.0, delta=1e-6)

    def test_form_factor_with_obstacle(self):
        reporte = form_factor_report(celda('E1'))
        self.assertAlmostEqual(reporte['ratio'], 2.0, delta=0.1)


@tag('lento')
class ReferenceTableTests(SimpleTestCase):
    """Valores de referencia a la resolución por defecto; las tablas usan la forma −div 𝔻."""

    def test_no_obstacle(self):
        tensor = permeability_tensor(CellSpec(None))
        np.testing.assert_allclose(np.diag(tensor.matrix), 1.0 / 12.0, rtol=1e-2)
        self.assertLess(tensor.diagnostics['elapsed'], 60.0)

    def test_disks(self):
        for nombre, valor in (('E1', 0.0697955), ('E4', 0.0153292)):
            tensor = permeability_tensor(CellSpec(PRESETS[nombre]), form=SIMETRICA)
            np.testing.assert_allclose(np.diag(tensor.matrix), valor, rtol=0.05)
            self.assertLessEqual(abs(tensor.matrix[0, 0] - tensor.matrix[1, 1]), 0.01 * tensor.matrix[0, 0])
            self.assertLessEqual(abs(tensor.matrix[0, 1]), 1e-4 * tensor.matrix[0, 0] + 1e-10)
            self.assertLessEqual(tensor.symmetry_defect, 1e-8)
            self.assertLess(tensor.diagnostics['elapsed'], 120.0)

    def test_ellipses(self):
        e2 = permeability_tensor(CellSpec(PRESETS['E2']), form=SIMETRICA)
        np.testing.assert_allclose(np.diag(e2.matrix), [0.054708, 0.0210978], rtol=0.05)
        e3 = permeability_tensor(CellSpec(PRESETS['E3']), form=SIMETRICA)
        np.testing.assert_allclose(np.diag(e3.matrix), [0.0210978, 0.054708], rtol=0.05)

    def test_laplacian_form_is_half_of_the_tables(self):
        e2 = permeability_tensor(CellSpec(PRESETS['E2']))
        np.testing.assert_allclose(np.diag(e2.matrix), [0.054708 / 2, 0.0210978 / 2], rtol=0.05)

    def test_rotated_e2(self):
        filas = rotated_permeability_table(CellSpec(PRESETS['E2']), [math.pi / 16, math.pi / 8, math.pi / 4],
                                           form=SIMETRICA)
        esperados = [(0.0534164, 0.00341334, 0.0225729), (0.0498291, 0.00653147, 0.0266649),
                     (0.0385604, 0.00963438, 0.0385636)]
        for fila, (a11, a12, a22) in zip(filas, esperados):
            self.assertAlmostEqual(fila['A11'] / a11, 1.0, delta=0.05)
            self.assertAlmostEqual(fila['A22'] / a22, 1.0, delta=0.05)
            self.assertAlmostEqual(fila['A12'] / a12, 1.0, delta=0.10)

    def test_alignment_on_disk(self):
        operador = PermeabilityOperator(CellSpec(PRESETS['E1']), Carreau(1.0, 1e-3, 10.0, 1.7))
        xi = np.array([math.cos(0.4), math.sin(0.4)])
        U = operador(xi).U
        angulo = abs(math.atan2(U[1], U[0]) - 0.4)
        self.assertLessEqual(angulo, 1e-3)

    def test_power_law_homogeneity_e1(self):
        r = 2.3
        operador = PermeabilityOperator(CellSpec(PRESETS['E1']), PowerLaw(1.0, r, 1e-10))
        base = operador((1.0, 0.0)).U
        for t in (2.0, 10.0):
            np.testing.assert_allclose(operador((t, 0.0)).U, t ** (conjugate_exponent(r) - 1.0) * base,
                                       rtol=0.01, atol=1e-12)

    def test_monotonicity_e1(self):
        cell = CellSpec(PRESETS['E1'])
        for ley in (Carreau(1.0, 1e-3, 100.0, 2.6), PowerLaw(1.0, 2.3, 1e-8)):
            operador = PermeabilityOperator(cell, ley)
            for k in range(10):
                a = 2 * math.pi * k / 10
                xi1 = np.array([math.cos(a), math.sin(a)]) * (0.3 + 0.07 * k)
                xi2 = np.array([math.cos(a + 2.0), math.sin(a + 2.0)]) * (1.0 - 0.04 * k)
                self.assertGreater((operador(xi1).U - operador(xi2).U) @ (xi1 - xi2), 0.0)
