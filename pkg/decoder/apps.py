from django.apps import AppConfig


class DecoderConfig(AppConfig):
    name = "decoder"
    verbose_name = "Decoder and copy mechanism"
