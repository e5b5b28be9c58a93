from django.apps import AppConfig


class TreecorrConfig(AppConfig):
    name = "treecorr"
    verbose_name = "Dependency tree correction"
