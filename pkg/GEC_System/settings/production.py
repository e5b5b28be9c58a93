"""
Django production settings for the GEC toolkit.
Long training runs log JSON to the console and ship errors to Sentry.
"""

import sentry_sdk
from sentry_sdk.integrations.django import DjangoIntegration

from .base import *

DEBUG = False

SECRET_KEY = config('SECRET_KEY')

LOGGING['formatters']['json'] = {
    '()': 'pythonjsonlogger.jsonlogger.JsonFormatter',
    'format': '%(asctime)s %(name)s %(levelname)s %(message)s',
}
LOGGING['handlers']['console']['formatter'] = 'json'
LOGGING['handlers']['error_file'] = {
    'level': 'ERROR',
    'class': 'logging.handlers.RotatingFileHandler',
    'filename': SGGEC_LOG_DIR / 'errors.log',
    'maxBytes': 1024 * 1024 * 50,  # 50 MB
    'backupCount': 10,
    'formatter': 'json',
}
for app in GEC_APPS:
    LOGGING['loggers'][app]['handlers'] = ['console', 'error_file']

# Sentry configuration for error tracking
SENTRY_DSN = config('SENTRY_DSN', default='')
if SENTRY_DSN:
    sentry_sdk.init(
        dsn=SENTRY_DSN,
        integrations=[DjangoIntegration()],
        traces_sample_rate=0.0,
        send_default_pii=False,
        environment='production',
        release=config('RELEASE_VERSION', default='1.0.0'),
    )
