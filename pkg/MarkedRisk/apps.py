from django.apps import AppConfig


class MarkedRiskConfig(AppConfig):
    name = 'MarkedRisk'
    verbose_name = 'Heavy-tailed marked point processes'
    default_auto_field = 'django.db.models.BigAutoField'
