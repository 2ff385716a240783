from django.db import models


class TimeStampedModel(models.Model):
    """Marca de creación y última actualización para los registros de corridas."""
    created_at = models.DateTimeField(auto_now_add=True)
    updated_at = models.DateTimeField(auto_now=True)

    class Meta:
        abstract = True
        ordering = ['-created_at']
