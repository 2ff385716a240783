# experiments/views.py

from django.db.models import Avg, Count
from django_filters.rest_framework import DjangoFilterBackend
from rest_framework import viewsets
from rest_framework.decorators import action
from rest_framework.filters import OrderingFilter, SearchFilter
from rest_framework.response import Response

from .models import Corrida
from .serializers import CorridaSerializer


class CorridaViewSet(viewsets.ReadOnlyModelViewSet):
    """
    Consulta de corridas registradas con ``--registrar``.
    Sólo lectura: las corridas se crean desde los comandos de gestión.
    """

    queryset = Corrida.objects.all()
    serializer_class = CorridaSerializer
    filter_backends = [DjangoFilterBackend, SearchFilter, OrderingFilter]
    filterset_fields = ['comando', 'estado', 'exit_code']
    search_fields = ['output_dir']
    ordering_fields = ['created_at', 'duracion', 'exit_code']
    ordering = ['-created_at']

    @action(detail=False, methods=['get'])
    def estadisticas(self, request):
        """Conteo de corridas y duración media por comando y estado."""
        filas = (
            self.filter_queryset(self.get_queryset())
            .values('comando', 'estado')
            .annotate(total=Count('id'), duracion_media=Avg('duracion'))
            .order_by('comando', 'estado')
        )
        return Response(list(filas))
