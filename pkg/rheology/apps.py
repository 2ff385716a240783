from django.apps import AppConfig


class RheologyConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'rheology'
    verbose_name = 'Leyes de viscosidad y regímenes'
