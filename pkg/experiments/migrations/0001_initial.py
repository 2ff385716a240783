# Generated by Django 5.2.6 on 2026-10-19 10:12

from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='Corrida',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('created_at', models.DateTimeField(auto_now_add=True)),
                ('updated_at', models.DateTimeField(auto_now=True)),
                ('comando', models.CharField(choices=[('mesh', 'Malla de la celda'), ('permeability', 'Tensor de permeabilidad'), ('sweep_amplitude', 'Barrido en amplitud'), ('sweep_rotation', 'Barrido en rotación'), ('regime_table', 'Tabla de regímenes'), ('validate', 'Suite de validación')], help_text='Comando ejecutado', max_length=20)),
                ('config', models.JSONField(blank=True, default=dict, help_text='Configuración de la corrida tal como fue leída')),
                ('estado', models.CharField(choices=[('EN_CURSO', 'En curso'), ('EXITOSA', 'Exitosa'), ('FALLIDA', 'Fallida')], default='EN_CURSO', help_text='Estado actual de la corrida', max_length=10)),
                ('exit_code', models.IntegerField(blank=True, help_text='Código de salida (0 éxito, 2 configuración/geometría, 3 solver, 4 validación)', null=True)),
                ('resumen', models.JSONField(blank=True, default=dict, help_text='Resumen de resultados o del error')),
                ('output_dir', models.CharField(blank=True, help_text='Directorio donde se escribieron los archivos de salida', max_length=500)),
                ('duracion', models.FloatField(blank=True, help_text='Duración de la corrida en segundos', null=True)),
            ],
            options={
                'verbose_name': 'Corrida',
                'verbose_name_plural': 'Corridas',
                'db_table': 'experiments_corrida',
                'ordering': ['-created_at'],
                'indexes': [models.Index(fields=['comando', 'estado'], name='experiments_comando_6c1f0a_idx'), models.Index(fields=['created_at'], name='experiments_created_9b2d4e_idx')],
            },
        ),
    ]
