from django.test import TestCase
from django.urls import reverse
from rest_framework.test import APIClient

from experiments.models import ComandoCorrida, Corrida, EstadoCorrida


class CorridaApiTests(TestCase):
    def setUp(self):
        self.client = APIClient()
        self.exitosa = Corrida.objects.create(comando=ComandoCorrida.PERMEABILITY, config={'name': 'e1'},
                                              output_dir='resultados/e1')
        self.exitosa.finalizar(0, {'rows': [{'A11': 0.0698}]}, 12.5)
        self.fallida = Corrida.objects.create(comando=ComandoCorrida.MESH, config={'name': 'grande'})
        self.fallida.finalizar(2, {'error': {'error': 'ClearanceViolation'}}, 0.1)

    def test_list_and_filter(self):
        respuesta = self.client.get(reverse('corridas-list'))
        self.assertEqual(respuesta.status_code, 200)
        self.assertEqual(respuesta.data['count'], 2)

        respuesta = self.client.get(reverse('corridas-list'), {'estado': EstadoCorrida.FALLIDA})
        self.assertEqual([c['id'] for c in respuesta.data['results']], [self.fallida.pk])

        respuesta = self.client.get(reverse('corridas-list'), {'comando': 'permeability'})
        self.assertEqual(respuesta.data['results'][0]['resumen']['rows'][0]['A11'], 0.0698)
        self.assertEqual(respuesta.data['results'][0]['comando_display'], 'Tensor de permeabilidad')

    def test_detail(self):
        respuesta = self.client.get(reverse('corridas-detail', args=[self.exitosa.pk]))
        self.assertEqual(respuesta.status_code, 200)
        self.assertEqual(respuesta.data['exit_code'], 0)
        self.assertEqual(respuesta.data['estado'], EstadoCorrida.EXITOSA)

    def test_read_only(self):
        respuesta = self.client.post(reverse('corridas-list'), {'comando': 'mesh'}, format='json')
        self.assertEqual(respuesta.status_code, 405)
        respuesta = self.client.delete(reverse('corridas-detail', args=[self.exitosa.pk]))
        self.assertEqual(respuesta.status_code, 405)

    def test_statistics(self):
        respuesta = self.client.get(reverse('corridas-estadisticas'))
        self.assertEqual(respuesta.status_code, 200)
        filas = {(f['comando'], f['estado']): f for f in respuesta.data}
        self.assertEqual(filas[('mesh', 'FALLIDA')]['total'], 1)
        self.assertAlmostEqual(filas[('permeability', 'EXITOSA')]['duracion_media'], 12.5)

    def test_openapi_schema(self):
        respuesta = self.client.get('/api/schema/')
        self.assertEqual(respuesta.status_code, 200)


class CorridaModelTests(TestCase):
    def test_finalizar_sets_state(self):
        corrida = Corrida.objects.create(comando=ComandoCorrida.VALIDATE)
        self.assertEqual(corrida.estado, EstadoCorrida.EN_CURSO)
        corrida.finalizar(4, {'passed': False}, 3.0)
        corrida.refresh_from_db()
        self.assertEqual(corrida.estado, EstadoCorrida.FALLIDA)
        self.assertFalse(corrida.exitosa)
        self.assertIn('Suite de validación', str(corrida))
