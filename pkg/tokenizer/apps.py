from django.apps import AppConfig


class TokenizerConfig(AppConfig):
    name = "tokenizer"
    verbose_name = "Sub-word tokenizer"
