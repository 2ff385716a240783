from django.test import SimpleTestCase, override_settings

from core.conf import DEFAULTS, get_setting
from core.exceptions import (
    ClearanceViolation, ConfigError, GeometryError, HomogenizationError, InvalidLaw, NoConvergence,
    PairingIncomplete, SolverBreakdown, SolverError, ValidationFailure,
)


class ExitCodeTests(SimpleTestCase):
    def test_exit_codes_by_family(self):
        self.assertEqual(InvalidLaw('x').exit_code, 2)
        self.assertEqual(ClearanceViolation('x').exit_code, 2)
        self.assertEqual(PairingIncomplete('x').exit_code, 2)
        self.assertEqual(SolverBreakdown('x').exit_code, 3)
        self.assertEqual(NoConvergence('x').exit_code, 3)
        self.assertEqual(ValidationFailure('x').exit_code, 4)

    def test_hierarchy(self):
        for clase in (ConfigError, GeometryError, SolverError, ValidationFailure):
            self.assertTrue(issubclass(clase, HomogenizationError))
        self.assertFalse(issubclass(GeometryError, ConfigError))

    def test_context_and_histories(self):
        error = NoConvergence('sin convergencia', history=[1e-2, 1e-3], relax=0.5)
        self.assertEqual(error.history, [1e-2, 1e-3])
        self.assertEqual(error.as_dict(), {'error': 'NoConvergence', 'mensaje': 'sin convergencia', 'relax': 0.5})
        self.assertEqual(SolverBreakdown('x').residual_history, [])
        self.assertEqual(str(ClearanceViolation('toca el borde')), 'toca el borde')


class SettingsTests(SimpleTestCase):
    @override_settings(HOMOGENIZACION={'H': 0.2})
    def test_configured_value_wins(self):
        self.assertEqual(get_setting('H'), 0.2)
        self.assertEqual(get_setting('N_LAYERS'), DEFAULTS['N_LAYERS'])

    @override_settings(HOMOGENIZACION={})
    def test_builtin_defaults(self):
        self.assertEqual(get_setting('ETA_INF'), 1e-3)
        self.assertEqual(get_setting('PICARD_TOL_REL'), 1e-8)

    def test_unknown_name(self):
        with self.assertRaises(KeyError):
            get_setting('NO_EXISTE')
