from django.apps import AppConfig


class NumericsConfig(AppConfig):
    name = "numerics"
    verbose_name = "Tensor algebra and optimisation"
