from django.apps import AppConfig


class FemStokesConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'fem_stokes'
    verbose_name = 'Stokes Taylor-Hood'
