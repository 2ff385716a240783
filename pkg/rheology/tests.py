import math

import numpy as np
from django.test import SimpleTestCase

from core.exceptions import InvalidLaw
from rheology.laws import Carreau, Newtonian, PowerLaw, conjugate_exponent, stress, viscosity
from rheology.regimes import DarcyRegime, power_prefactor, regime_select, regime_table


class ViscosityTests(SimpleTestCase):
    def setUp(self):
        self.d_grid = np.logspace(-6, 4, 200)

    def test_carreau_at_zero_shear_is_eta_0(self):
        for r in (1.7, 2.3, 2.6):
            law = Carreau(1.0, 1e-3, 10.0, r)
            self.assertAlmostEqual(viscosity(law, 0.0), 1.0, places=14)

    def test_carreau_r2_is_newtonian(self):
        law = Carreau(2.5, 1e-3, 7.0, 2.0)
        np.testing.assert_allclose(viscosity(law, self.d_grid), 2.5, rtol=1e-14)

    def test_carreau_direct_evaluation(self):
        law = Carreau(1.0, 1e-3, 1.0, 1.7)
        esperado = 0.999 * 4 ** (-0.15) + 0.001
        self.assertAlmostEqual(viscosity(law, math.sqrt(3.0)), esperado, places=12)
        self.assertAlmostEqual(viscosity(law, math.sqrt(3.0)), 0.8124, places=4)

    def test_carreau_bounds(self):
        pseudo = Carreau(1.0, 1e-3, 100.0, 1.7)
        eta = viscosity(pseudo, self.d_grid)
        self.assertTrue(np.all(eta <= 1.0) and np.all(eta >= 1e-3))
        dilatante = Carreau(1.0, 1e-3, 100.0, 2.6)
        self.assertTrue(np.all(viscosity(dilatante, self.d_grid) >= 1.0))

    def test_monotone_stress(self):
        s = np.linspace(1e-6, 1e4, 20001)
        for lam in (1.0, 10.0, 100.0):
            for r in (1.1, 1.7, 2.0, 2.3, 2.6, 4.0):
                tau = stress(Carreau(1.0, 1e-3, lam, r), s)
                self.assertTrue(np.all(np.diff(tau) > 0), msg=f"lam={lam}, r={r}")

    def test_carreau_newtonian_continuity(self):
        law = Carreau(1.0, 1e-3, 1.0, 2.6)
        d = math.sqrt(1e-8)
        self.assertLessEqual(abs(viscosity(law, d) - 1.0), 1e-6)

    def test_power_law_regularized(self):
        law = PowerLaw(1.0, 3.0, 1e-6)
        self.assertAlmostEqual(viscosity(law, 0.0), 1e-6, places=18)
        self.assertAlmostEqual(viscosity(law, 2.0), math.sqrt(4.0 + 1e-12), places=12)

    def test_stress_is_zero_at_zero_shear_even_if_degenerate(self):
        self.assertEqual(stress(PowerLaw(1.0, 1.5, 0.0), 0.0), 0.0)

    def test_newtonian(self):
        np.testing.assert_array_equal(viscosity(Newtonian(3.0), self.d_grid), 3.0)

    def test_invalid_parameters(self):
        with self.assertRaises(InvalidLaw):
            Carreau(1e-3, 1.0, 1.0, 1.7)
        with self.assertRaises(InvalidLaw):
            Carreau(1.0, 1e-3, 1.0, 1.0)
        with self.assertRaises(InvalidLaw):
            PowerLaw(1.0, 3.0, -1.0)
        with self.assertRaises(InvalidLaw):
            Newtonian(0.0)


class ConjugateExponentTests(SimpleTestCase):
    def test_values(self):
        self.assertEqual(conjugate_exponent(2.0), 2.0)
        self.assertEqual(conjugate_exponent(3.0), 1.5)
        self.assertAlmostEqual(conjugate_exponent(2.6), 1.625, places=14)

    def test_requires_r_above_one(self):
        with self.assertRaises(InvalidLaw):
            conjugate_exponent(1.0)


class RegimeSelectTests(SimpleTestCase):
    def test_pseudoplastic_small_gamma(self):
        tipo = regime_select(1.7, 0.5)
        self.assertEqual(tipo.regime, DarcyRegime.LINEAR)
        self.assertEqual(tipo.viscosity_symbol, 'eta_0')

    def test_pseudoplastic_large_gamma_uses_eta_inf(self):
        tipo = regime_select(1.7, 2.0, eta_0=1.0, eta_inf=1e-3)
        self.assertEqual(tipo.regime, DarcyRegime.LINEAR)
        self.assertEqual(tipo.viscosity_symbol, 'eta_inf')
        self.assertEqual(tipo.eta, 1e-3)

    def test_dilatant_large_gamma_is_power_type(self):
        tipo = regime_select(2.3, 2.0, eta_0=1.0, eta_inf=1e-3, lam=1.0)
        self.assertEqual(tipo.regime, DarcyRegime.POWER)
        rp = 2.3 / 1.3
        self.assertAlmostEqual(tipo.prefactor, 1.0 / (0.999 ** (rp - 1.0)), places=12)
        self.assertAlmostEqual(tipo.prefactor, 1.00077, places=5)

    def test_critical_gamma(self):
        self.assertEqual(regime_select(2.3, 1.0).regime, DarcyRegime.CARREAU)
        self.assertEqual(regime_select(1.7, 1.0).regime, DarcyRegime.CARREAU)
        self.assertEqual(regime_select(2.0, 1.0).regime, DarcyRegime.LINEAR)

    def test_newtonian_column_is_constant(self):
        for gamma in np.linspace(-3.0, 5.0, 33):
            tipo = regime_select(2.0, float(gamma))
            self.assertEqual((tipo.regime, tipo.viscosity_symbol), (DarcyRegime.LINEAR, 'eta_0'))

    def test_piecewise_constant_in_gamma(self):
        for r in (1.3, 1.7, 2.3, 2.6):
            debajo = {regime_select(r, g).label for g in (-2.0, 0.0, 0.5, 0.999)}
            encima = {regime_select(r, g).label for g in (1.001, 2.0, 10.0)}
            self.assertEqual(len(debajo), 1)
            self.assertEqual(len(encima), 1)

    def test_table_reproduction(self):
        esperado = {
            (0.5, 1.7): "Linear 2D Darcy's law (viscosity η0)",
            (0.5, 2.0): "Linear 2D Darcy's law (viscosity η0)",
            (0.5, 2.3): "Linear 2D Darcy's law (viscosity η0)",
            (1.0, 1.7): "Non-linear 2D Darcy's law (Carreau type)",
            (1.0, 2.0): "Linear 2D Darcy's law (viscosity η0)",
            (1.0, 2.3): "Non-linear 2D Darcy's law (Carreau type)",
            (2.0, 1.7): "Linear 2D Darcy's law (viscosity η∞)",
            (2.0, 2.0): "Linear 2D Darcy's law (viscosity η0)",
            (2.0, 2.3): "Non-linear 2D Darcy's law (power law type)",
        }
        filas = regime_table()
        self.assertEqual(len(filas), 9)
        for fila in filas:
            self.assertEqual(fila['label'], esperado[(fila['gamma'], fila['r'])])

    def test_prefactor_positive(self):
        for lam in (1.0, 10.0, 100.0):
            for r in (2.3, 2.6, 3.0):
                self.assertGreater(power_prefactor(r, 1.0, 1e-3, lam), 0.0)
