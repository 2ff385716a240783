# experiments/urls.py

from django.urls import include, path
from rest_framework.routers import DefaultRouter

from .views import CorridaViewSet

router = DefaultRouter()
router.register(r'corridas', CorridaViewSet, basename='corridas')

urlpatterns = [
    path('', include(router.urls)),
]

# Patrones de URL disponibles:
"""
Corridas registradas:
- GET    /api/corridas/                  - Listar corridas (filtros: comando, estado, exit_code)
- GET    /api/corridas/{id}/             - Detalle de una corrida (config y resumen)
- GET    /api/corridas/estadisticas/     - Conteos y duración media por comando y estado

Filtros y orden:
- ?comando=permeability&estado=EXITOSA
- ?search=resultados
- ?ordering=-duracion
"""
