# experiments/serializers.py

from rest_framework import serializers

from cell_mesh.geometry import PRESETS
from .models import Corrida


class ShapeSerializer(serializers.Serializer):
    """Inclusión explícita: disco o elipse."""

    kind = serializers.ChoiceField(choices=['disk', 'ellipse'])
    radius = serializers.FloatField(required=False, min_value=0.0)
    semi_major = serializers.FloatField(required=False, min_value=0.0)
    semi_minor = serializers.FloatField(required=False, min_value=0.0)
    angle = serializers.FloatField(required=False, default=0.0)

    def validate(self, attrs):
        if attrs['kind'] == 'disk':
            if not attrs.get('radius'):
                raise serializers.ValidationError({'radius': "El disco requiere radius > 0."})
        else:
            mayor, menor = attrs.get('semi_major'), attrs.get('semi_minor')
            if not mayor or not menor:
                raise serializers.ValidationError("La elipse requiere semi_major y semi_minor > 0.")
            if mayor < menor:
                raise serializers.ValidationError(
                    {'semi_major': "semi_major debe ser mayor o igual que semi_minor."}
                )
        return attrs


class CellSerializer(serializers.Serializer):
    """Celda: preset o inclusión explícita, con ángulo opcional y resolución."""

    preset = serializers.ChoiceField(choices=list(PRESETS), required=False)
    angle = serializers.FloatField(required=False)
    shape = ShapeSerializer(required=False, allow_null=True)
    n_seg = serializers.IntegerField(required=False, min_value=16)
    h = serializers.FloatField(required=False, min_value=0.0)
    n_layers = serializers.IntegerField(required=False, min_value=4)

    def validate(self, attrs):
        if 'preset' in attrs and 'shape' in attrs:
            raise serializers.ValidationError("Use preset o shape, no ambos.")
        if 'h' in attrs and not attrs['h'] > 0:
            raise serializers.ValidationError({'h': "h debe ser > 0."})
        sin_inclusion = attrs.get('preset') == 'NONE' or ('shape' in attrs and attrs['shape'] is None)
        if sin_inclusion and 'angle' in attrs:
            raise serializers.ValidationError({'angle': "La celda sin inclusión no admite ángulo."})
        return attrs


class LawSerializer(serializers.Serializer):
    """Parámetros reológicos y de escala."""

    eta_0 = serializers.FloatField(required=False, min_value=0.0)
    eta_inf = serializers.FloatField(required=False, min_value=0.0)
    # 'lambda' es palabra reservada: se declara en __init__
    r = serializers.FloatField(required=False)
    r_list = serializers.ListField(child=serializers.FloatField(), required=False, allow_empty=False)
    gamma = serializers.FloatField(required=False)
    delta_reg = serializers.FloatField(required=False, min_value=0.0)
    family = serializers.BooleanField(required=False, default=True)

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.fields['lambda'] = serializers.FloatField(required=False, min_value=0.0)

    def validate(self, attrs):
        eta_0, eta_inf = attrs.get('eta_0'), attrs.get('eta_inf')
        if eta_0 is not None and eta_inf is not None and not eta_0 > eta_inf:
            raise serializers.ValidationError({'eta_inf': "Se requiere eta_0 > eta_inf."})
        for clave in ('eta_0', 'eta_inf', 'lambda'):
            if clave in attrs and not attrs[clave] > 0:
                raise serializers.ValidationError({clave: f"{clave} debe ser > 0."})
        exponentes = list(attrs.get('r_list', [])) + ([attrs['r']] if 'r' in attrs else [])
        if any(not r > 1 for r in exponentes):
            raise serializers.ValidationError({'r': "Todo exponente r debe ser > 1."})
        if 'r' in attrs and 'r_list' in attrs:
            raise serializers.ValidationError("Use r o r_list, no ambos.")
        if attrs.get('delta_reg') == 0 and any(r > 2 for r in exponentes):
            raise serializers.ValidationError(
                {'delta_reg': "La ley potencia con r > 2 requiere delta_reg > 0 fuera del oráculo de canal."})
        return attrs


class SolverSerializer(serializers.Serializer):
    saddle_tol = serializers.FloatField(required=False, min_value=0.0)
    picard_max_iter = serializers.IntegerField(required=False, min_value=1)
    picard_tol_rel = serializers.FloatField(required=False, min_value=0.0)
    picard_relax = serializers.FloatField(required=False, min_value=0.0, max_value=1.0)
    tensor_form = serializers.ChoiceField(choices=['laplacian', 'symmetric'], required=False, default='laplacian')

    def validate(self, attrs):
        for clave in ('saddle_tol', 'picard_tol_rel', 'picard_relax'):
            if clave in attrs and not attrs[clave] > 0:
                raise serializers.ValidationError({clave: f"{clave} debe ser > 0."})
        return attrs


class AmplitudeSweepSerializer(serializers.Serializer):
    """Grilla de f₁: lista explícita o start/stop/step."""

    values = serializers.ListField(child=serializers.FloatField(), required=False, allow_empty=False)
    start = serializers.FloatField(required=False, default=0.05)
    stop = serializers.FloatField(required=False, default=1.0)
    step = serializers.FloatField(required=False, default=0.05, min_value=0.0)
    f2 = serializers.FloatField(required=False, default=0.0)

    def validate(self, attrs):
        if 'values' not in attrs:
            if not attrs['step'] > 0:
                raise serializers.ValidationError({'step': "step debe ser > 0."})
            if attrs['stop'] < attrs['start']:
                raise serializers.ValidationError({'stop': "stop debe ser >= start."})
        return attrs


class RotationSweepSerializer(serializers.Serializer):
    n_theta = serializers.IntegerField(required=False, default=16, min_value=2)
    theta_min = serializers.FloatField(required=False, default=0.0)
    theta_max = serializers.FloatField(required=False)
    amplitude = serializers.FloatField(required=False, default=1.0, min_value=0.0)

    def validate(self, attrs):
        if 'theta_max' in attrs and attrs['theta_max'] <= attrs['theta_min']:
            raise serializers.ValidationError({'theta_max': "theta_max debe ser > theta_min."})
        if not attrs['amplitude'] > 0:
            raise serializers.ValidationError({'amplitude': "amplitude debe ser > 0."})
        return attrs


class SweepsSerializer(serializers.Serializer):
    amplitude = AmplitudeSweepSerializer(required=False)
    rotation = RotationSweepSerializer(required=False)
    permeability_angles = serializers.ListField(child=serializers.FloatField(), required=False)


class OutputSerializer(serializers.Serializer):
    dir = serializers.CharField(required=False)
    write_kkt = serializers.BooleanField(required=False, default=False)
    write_vtk = serializers.BooleanField(required=False, default=False)


class ValidationSettingsSerializer(serializers.Serializer):
    fault = serializers.ChoiceField(choices=['prefactor'], required=False, allow_null=True, default=None)
    channel_h = serializers.FloatField(required=False, default=0.5, min_value=0.0)
    channel_n_layers = serializers.IntegerField(required=False, default=16, min_value=4)


class RunConfigSerializer(serializers.Serializer):
    """Validación de segunda etapa (tipos y reglas cruzadas) del RunConfig."""

    name = serializers.CharField(required=False, max_length=80)
    deterministic_seedless = serializers.BooleanField(required=False, default=True)
    threads = serializers.IntegerField(required=False, min_value=1)
    cell = CellSerializer(required=False)
    law = LawSerializer(required=False)
    solver = SolverSerializer(required=False)
    sweeps = SweepsSerializer(required=False)
    output = OutputSerializer(required=False)
    validation = ValidationSettingsSerializer(required=False)

    def validate_deterministic_seedless(self, value):
        if not value:
            raise serializers.ValidationError("Todas las corridas son deterministas; el valor debe ser true.")
        return value


class CorridaSerializer(serializers.ModelSerializer):
    """Serializer de lectura para corridas registradas."""

    comando_display = serializers.CharField(source='get_comando_display', read_only=True)
    estado_display = serializers.CharField(source='get_estado_display', read_only=True)

    class Meta:
        model = Corrida
        fields = [
            'id', 'comando', 'comando_display', 'estado', 'estado_display',
            'exit_code', 'config', 'resumen', 'output_dir', 'duracion',
            'created_at', 'updated_at',
        ]
        read_only_fields = fields
