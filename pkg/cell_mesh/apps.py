from django.apps import AppConfig


class CellMeshConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'cell_mesh'
    verbose_name = 'Mallas de la celda unitaria'
