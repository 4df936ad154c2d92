import math
from collections.abc import Mapping

from django.conf import settings
from rest_framework import serializers
from rest_framework.fields import SkipField

from .models import OutageResult, OutageRun
from .scenario import SWEEP_PARAMETERS, ChannelPolicy, DistanceMode, TargetGroup


def default_seed():
    return settings.OUTAGE_DEFAULT_SEED


class RunConfigSerializer(serializers.Serializer):
    """
    Flat run configuration in the units of the config file.

    Every field has a default, so an empty configuration is the default scenario.
    """

    mode = serializers.ChoiceField(choices=['analytic', 'montecarlo', 'both'], default='both')

    T_dB = serializers.FloatField(default=-18.0, help_text='SINR threshold in dB')
    p_m_dBW = serializers.FloatField(default=20.0, help_text='Target transmit power in dBW')
    p1_dBW = serializers.FloatField(default=20.0, help_text='A1 transmit power in dBW')
    p2_dBW = serializers.FloatField(default=19.0, help_text='A2 transmit power in dBW')
    alpha = serializers.FloatField(default=2.0, min_value=2.0, help_text='Path-loss exponent')
    d0_km = serializers.FloatField(default=300.0, help_text='Common aerial-satellite distance in km')
    noise_dBm = serializers.FloatField(default=-160.0, help_text='Noise power (per Hz) in dBm')
    bandwidth_hz = serializers.FloatField(default=1.0, help_text='Multiplies the noise power')

    R1_km = serializers.FloatField(default=10.0, min_value=0.0, help_text='Deployment radius in km')
    D_min_km = serializers.FloatField(default=1.0, help_text='Hard-core distance in km')
    lambda1 = serializers.FloatField(default=1e-11, min_value=0.0, help_text='Candidate density in points/m^3')
    c_bar = serializers.FloatField(default=5.0, min_value=0.0, help_text='Mean cluster size')
    N1 = serializers.IntegerField(default=40, min_value=0, help_text='Number of A1 nodes')
    K = serializers.IntegerField(default=4, min_value=1, help_text='Number of FDMA channels')
    target_group = serializers.ChoiceField(choices=[g.value for g in TargetGroup], default='A1')

    sr_c = serializers.FloatField(default=0.158, help_text='Half the mean multipath power')
    sr_q = serializers.FloatField(default=1.0, help_text='Nakagami parameter of the LoS amplitude')
    sr_omega = serializers.FloatField(default=0.1, min_value=0.0, help_text='Mean LoS power')

    G_t_dBi = serializers.FloatField(default=10.0, help_text='Transmit main-lobe gain in dBi')
    g_t_dBi = serializers.FloatField(default=-10.0, help_text='Transmit side-lobe gain in dBi')
    G_r_dBi = serializers.FloatField(default=30.0, help_text='Receive main-lobe gain in dBi')
    theta = serializers.FloatField(
        default=math.pi / 6, min_value=0.0, max_value=2.0 * math.pi,
        help_text='Transmit main-lobe width in radians',
    )

    n_iter = serializers.IntegerField(default=50_000, min_value=1)
    seed = serializers.IntegerField(default=default_seed, min_value=0, max_value=2 ** 63 - 1)
    k_max = serializers.IntegerField(default=200, min_value=0)
    tol = serializers.FloatField(default=1e-10)

    distance_mode = serializers.ChoiceField(
        choices=[m.value for m in DistanceMode], default=DistanceMode.COMMON_D0.value,
    )
    a2_channel_policy = serializers.ChoiceField(
        choices=[p.value for p in ChannelPolicy], default=ChannelPolicy.ALL_ON_CHANNEL.value,
    )
    satellite_offset_km = serializers.FloatField(required=False, allow_null=True, default=None)

    sweep_param = serializers.ChoiceField(choices=SWEEP_PARAMETERS, required=False, allow_null=True, default=None)
    sweep_values = serializers.CharField(
        required=False, allow_null=True, default=None,
        help_text='Comma separated values in the units of the swept key',
    )

    def _positive(self, value):
        if not value > 0:
            raise serializers.ValidationError('Must be greater than 0.')
        return value

    validate_d0_km = _positive
    validate_D_min_km = _positive
    validate_bandwidth_hz = _positive
    validate_sr_c = _positive
    validate_sr_q = _positive
    validate_tol = _positive

    def validate_satellite_offset_km(self, value):
        return None if value is None else self._positive(value)

    def validate_sweep_values(self, value):
        if value is None:
            return None
        try:
            values = [float(item) for item in value.split(',') if item.strip()]
        except ValueError:
            raise serializers.ValidationError('Values must be comma separated numbers.')
        if not values:
            raise serializers.ValidationError('At least one value is required.')
        return values

    def to_internal_value(self, data):
        try:
            return super().to_internal_value(data)
        except serializers.ValidationError as exc:
            if not isinstance(data, Mapping):
                raise
            # field errors stop DRF before validate(); add the cross-field ones
            errors = dict(exc.detail)
            for key, message in self.cross_field_errors(self._valid_fields(data, errors)).items():
                errors.setdefault(key, [message])
            raise serializers.ValidationError(errors)

    def _valid_fields(self, data, errors):
        """Values of the fields that passed validation on their own"""
        values = {}
        for field in self._writable_fields:
            if field.field_name in errors:
                continue
            try:
                value = field.run_validation(field.get_value(data))
                validator = getattr(self, f'validate_{field.field_name}', None)
                if validator is not None:
                    value = validator(value)
            except (serializers.ValidationError, SkipField):
                continue
            values[field.field_name] = value
        return values

    def cross_field_errors(self, attrs):
        """Invariants spanning several keys; keys missing from ``attrs`` are skipped"""
        errors = {}

        n1, k = attrs.get('N1'), attrs.get('K')
        if n1 is not None and k is not None and n1 % k:
            errors['K'] = f"N1 = {n1} must be divisible by K = {k}"
        if n1 == 0 and attrs.get('target_group') == TargetGroup.A1.value:
            errors['N1'] = 'An A1 target needs at least one A1 node per channel'

        main, side = attrs.get('G_t_dBi'), attrs.get('g_t_dBi')
        if main is not None and side is not None and side > main:
            errors['g_t_dBi'] = 'Side-lobe gain must not exceed the main-lobe gain'

        if 'sweep_param' in attrs and 'sweep_values' in attrs:
            param, values = attrs['sweep_param'], attrs['sweep_values']
            if (param is None) != (values is None):
                errors['sweep_param'] = 'sweep_param and sweep_values must be given together'
            elif param == 'K' and n1 is not None:
                bad = [v for v in values if not v.is_integer() or v < 1 or n1 % int(v)]
                if bad:
                    errors['sweep_values'] = f"K values {bad} do not divide N1 = {n1}"
            elif param in ('R1', 'lambda1') and any(v < 0 for v in values):
                errors['sweep_values'] = f"{param} values must be >= 0"

        return errors

    def validate(self, attrs):
        errors = self.cross_field_errors(attrs)
        if errors:
            raise serializers.ValidationError(errors)
        return attrs


class OutageResultSerializer(serializers.ModelSerializer):
    """Serializer for one result row"""

    class Meta:
        model = OutageResult
        fields = ['position', 'sweep_value', 'p_out_analytic', 'p_out_mc', 'mc_ci95', 'runtime_ms']
        read_only_fields = fields


class OutageRunSerializer(serializers.ModelSerializer):
    """Stored run without its result rows"""

    results_count = serializers.IntegerField(source='results.count', read_only=True)

    class Meta:
        model = OutageRun
        fields = [
            'id', 'mode', 'sweep_param', 'seed', 'n_iter',
            'results_count', 'created_at', 'finished_at',
        ]
        read_only_fields = fields


class OutageRunDetailSerializer(OutageRunSerializer):
    """Stored run with configuration, metadata and result rows"""

    results = OutageResultSerializer(many=True, read_only=True)

    class Meta(OutageRunSerializer.Meta):
        fields = OutageRunSerializer.Meta.fields + ['config', 'metadata', 'results']
        read_only_fields = fields
