import numpy as np
from django.test import SimpleTestCase

from channel_oracle.oracle import (
    channel_flux, channel_flux_closed_power, channel_flux_newtonian, channel_profile, closed_form_check,
)
from core.exceptions import RootBracketFailure
from rheology.laws import Carreau, Newtonian, PowerLaw


class ClosedPowerTests(SimpleTestCase):
    def test_values(self):
        self.assertAlmostEqual(channel_flux_closed_power(2.0, 1.0), 1.0 / 6.0, places=15)
        self.assertAlmostEqual(channel_flux_closed_power(3.0, 1.0), 0.2378414, places=7)
        self.assertEqual(channel_flux_closed_power(2.6, 0.0), 0.0)


class ChannelFluxTests(SimpleTestCase):
    def test_newtonian_is_exact(self):
        for eta in (1.0, 1e-3, 4.0):
            self.assertAlmostEqual(channel_flux(Newtonian(eta), 1.0) * 6 * eta, 1.0, places=12)
        self.assertAlmostEqual(channel_flux_newtonian(2.0, 3.0), 0.25)

    def test_power_law_matches_closed_form(self):
        for fila in closed_form_check():
            self.assertLess(fila['rel_error'], 1e-8, msg=str(fila))

    def test_zero_load(self):
        self.assertEqual(channel_flux(Carreau(1.0, 1e-3, 10.0, 1.7), 0.0), 0.0)

    def test_profile_boundary_values_and_symmetry(self):
        perfil = channel_profile(Carreau(1.0, 1e-3, 10.0, 1.7), 2.0)
        self.assertEqual(perfil.velocity[0], 0.0)
        self.assertAlmostEqual(perfil.velocity[-1], 0.0, delta=1e-12 * perfil.velocity.max())
        np.testing.assert_allclose(perfil.velocity, perfil.velocity[::-1], atol=1e-12 * perfil.velocity.max())
        np.testing.assert_allclose(perfil.shear, -perfil.shear[::-1], atol=1e-14)
        medio = len(perfil.z_nodes) // 2
        self.assertAlmostEqual(perfil.z_nodes[medio], 0.5, places=15)
        self.assertAlmostEqual(perfil.velocity[medio], perfil.velocity.max(), places=14)

    def test_carreau_monotone_in_xi(self):
        ley = Carreau(1.0, 1e-3, 10.0, 1.7)
        flujos = [channel_flux(ley, xi) for xi in np.linspace(0.1, 5.0, 12)]
        self.assertTrue(np.all(np.diff(flujos) > 0))

    def test_carreau_lambda_independent_at_r2(self):
        a = channel_flux(Carreau(1.0, 1e-3, 1.0, 2.0), 1.3)
        b = channel_flux(Carreau(1.0, 1e-3, 100.0, 2.0), 1.3)
        self.assertAlmostEqual(a, b, places=13)

    def test_carreau_bounds(self):
        for xi in (0.5, 2.0, 20.0):
            eta0 = channel_flux_newtonian(1.0, xi)
            etainf = channel_flux_newtonian(1e-3, xi)
            pseudo = channel_flux(Carreau(1.0, 1e-3, 10.0, 1.7), xi)
            self.assertTrue(eta0 < pseudo < etainf)
            dilatante = channel_flux(Carreau(1.0, 1e-3, 10.0, 2.6), xi)
            self.assertLess(dilatante, eta0)

    def test_bracket_failure(self):
        # Esfuerzo acotado: la raíz no existe para cargas grandes.
        class Saturada(Newtonian):
            def evaluate(self, d):
                return 1.0 / (1.0 + np.asarray(d, dtype=float))

        with self.assertRaises(RootBracketFailure):
            channel_flux(Saturada(1.0), 10.0)

    def test_power_law_regularization_converges(self):
        exacto = channel_flux_closed_power(2.6, 1.0)
        regularizado = channel_flux(PowerLaw(1.0, 2.6, 1e-6), 1.0)
        self.assertLess(abs(regularizado - exacto) / exacto, 1e-6)
