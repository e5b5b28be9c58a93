from django.apps import AppConfig


class DeptreeConfig(AppConfig):
    name = "deptree"
    verbose_name = "Dependency trees"
