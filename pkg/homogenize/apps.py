from django.apps import AppConfig


class HomogenizeConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'homogenize'
    verbose_name = 'Permeabilidad efectiva'
