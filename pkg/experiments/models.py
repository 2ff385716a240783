# experiments/models.py

from django.db import models

from core.models import TimeStampedModel


class ComandoCorrida(models.TextChoices):
    """Comandos de línea que pueden registrar una corrida."""
    MESH = 'mesh', 'Malla de la celda'
    PERMEABILITY = 'permeability', 'Tensor de permeabilidad'
    SWEEP_AMPLITUDE = 'sweep_amplitude', 'Barrido en amplitud'
    SWEEP_ROTATION = 'sweep_rotation', 'Barrido en rotación'
    REGIME_TABLE = 'regime_table', 'Tabla de regímenes'
    VALIDATE = 'validate', 'Suite de validación'


class EstadoCorrida(models.TextChoices):
    """Estados de una corrida registrada."""
    EN_CURSO = 'EN_CURSO', 'En curso'
    EXITOSA = 'EXITOSA', 'Exitosa'
    FALLIDA = 'FALLIDA', 'Fallida'


class Corrida(TimeStampedModel):
    """
    Registro de una ejecución de comando (opción ``--registrar``).
    Guarda la configuración validada, el resumen de resultados y el código de salida.
    """

    comando = models.CharField(
        max_length=20,
        choices=ComandoCorrida.choices,
        help_text="Comando ejecutado"
    )

    config = models.JSONField(
        default=dict,
        blank=True,
        help_text="Configuración de la corrida tal como fue leída"
    )

    estado = models.CharField(
        max_length=10,
        choices=EstadoCorrida.choices,
        default=EstadoCorrida.EN_CURSO,
        help_text="Estado actual de la corrida"
    )

    exit_code = models.IntegerField(
        null=True,
        blank=True,
        help_text="Código de salida (0 éxito, 2 configuración/geometría, 3 solver, 4 validación)"
    )

    resumen = models.JSONField(
        default=dict,
        blank=True,
        help_text="Resumen de resultados o del error"
    )

    output_dir = models.CharField(
        max_length=500,
        blank=True,
        help_text="Directorio donde se escribieron los archivos de salida"
    )

    duracion = models.FloatField(
        null=True,
        blank=True,
        help_text="Duración de la corrida en segundos"
    )

    class Meta:
        db_table = 'experiments_corrida'
        verbose_name = 'Corrida'
        verbose_name_plural = 'Corridas'
        ordering = ['-created_at']
        indexes = [
            models.Index(fields=['comando', 'estado']),
            models.Index(fields=['created_at']),
        ]

    def __str__(self):
        return f"Corrida #{self.pk} - {self.get_comando_display()} ({self.get_estado_display()})"

    def finalizar(self, exit_code: int, resumen: dict, duracion: float):
        """Cierra la corrida con su código de salida."""
        self.exit_code = exit_code
        self.estado = EstadoCorrida.EXITOSA if exit_code == 0 else EstadoCorrida.FALLIDA
        self.resumen = resumen
        self.duracion = duracion
        self.save(update_fields=['exit_code', 'estado', 'resumen', 'duracion', 'updated_at'])

    @property
    def exitosa(self) -> bool:
        return self.estado == EstadoCorrida.EXITOSA
