# experiments/admin.py

from django.contrib import admin

from .models import Corrida


@admin.register(Corrida)
class CorridaAdmin(admin.ModelAdmin):
    """
    Administración de las corridas registradas por los comandos.
    """

    list_display = [
        'pk',
        'comando',
        'estado',
        'exit_code',
        'duracion',
        'output_dir',
        'created_at'
    ]

    list_filter = [
        'comando',
        'estado',
        'created_at'
    ]

    search_fields = ['output_dir']

    readonly_fields = ['created_at', 'updated_at']

    fieldsets = (
        ('Ejecución', {
            'fields': (
                'comando',
                'estado',
                'exit_code',
                'duracion'
            ),
            'description': 'Comando ejecutado y resultado'
        }),
        ('Datos', {
            'fields': (
                'config',
                'resumen',
                'output_dir'
            ),
            'description': 'Configuración validada, resumen de resultados y directorio de salida'
        }),
        ('Fechas', {
            'fields': (
                'created_at',
                'updated_at'
            ),
            'classes': ('collapse',)
        }),
    )
