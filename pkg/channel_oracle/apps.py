from django.apps import AppConfig


class ChannelOracleConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'channel_oracle'
    verbose_name = 'Oráculo del canal plano'
