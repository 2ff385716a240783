from django.test import SimpleTestCase

from core.exceptions import ValidationFailure
from experiments.config import parse_run_config
from experiments.validation import (
    CHECKS, check_carreau_bounds, check_monotone_stress, check_power_channel, check_regime_table, run_validation,
)


class ValidationSuiteTests(SimpleTestCase):
    def setUp(self):
        self.config = parse_run_config({})

    def test_suite_covers_channel_rheology_and_effective_law_properties(self):
        nombres = {check.__name__ for check in CHECKS}
        for nombre in ('check_power_channel', 'check_carreau_channel_small_force',
                       'check_carreau_channel_shear_thinning', 'check_carreau_bounds', 'check_monotone_stress',
                       'check_effective_monotonicity', 'check_power_homogeneity'):
            self.assertIn(nombre, nombres)

    def test_report_names_new_checks(self):
        reporte = run_validation(self.config, checks=[check_carreau_bounds, check_monotone_stress,
                                                      check_power_channel])
        nombres = [c['name'] for c in reporte.as_dict()['checks']]
        self.assertEqual(nombres, ['carreau_bounds', 'carreau_monotone_stress', 'power_channel_r3'])
        self.assertTrue(reporte.passed, msg=[c.as_dict() for c in reporte.failures])
        reporte.raise_for_failures()

    def test_failures_are_collected(self):
        def siempre_falla(config):
            raise ValidationFailure("falla")

        reporte = run_validation(self.config, checks=[check_regime_table, siempre_falla])
        self.assertFalse(reporte.passed)
        self.assertEqual([c.name for c in reporte.failures], ['siempre_falla'])
        with self.assertRaises(ValidationFailure):
            reporte.raise_for_failures()
