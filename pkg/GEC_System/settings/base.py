"""
Django base settings for the syntax-guided GEC toolkit.
Settings common to all environments. The project is driven entirely through
management commands: there is no database, no URL configuration and no
middleware.
"""

from pathlib import Path

from decouple import config

BASE_DIR = Path(__file__).resolve().parent.parent.parent

SECRET_KEY = config('SECRET_KEY', default='django-insecure-gec-toolkit-key')

DEBUG = config('DEBUG', default=False, cast=bool)

# ==============================================================================
# APPLICATION DEFINITION
# ==============================================================================

INSTALLED_APPS = [
    'core',
    'numerics',
    'deptree',
    'tokenizer',
    'encoder',
    'decoder',
    'treecorr',
    'training',
    'inference',
    'evaluation',
]

DATABASES = {}

USE_TZ = True
TIME_ZONE = 'UTC'

# ==============================================================================
# GEC SETTINGS
# ==============================================================================

# Worker threads for sentence-parallel loops; 0 means one per CPU
SGGEC_THREADS = config('SGGEC_THREADS', default=0, cast=int)

# Default seed for commands that take --seed
SGGEC_SEED = config('SGGEC_SEED', default=1234, cast=int)

SGGEC_LOG_DIR = Path(config('SGGEC_LOG_DIR', default=str(BASE_DIR / 'logs')))
SGGEC_LOG_LEVEL = config('SGGEC_LOG_LEVEL', default='INFO')

# ==============================================================================
# LOGGING CONFIGURATION
# ==============================================================================

GEC_APPS = ['core', 'numerics', 'deptree', 'tokenizer', 'encoder', 'decoder', 'treecorr', 'training', 'inference',
            'evaluation']

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '[{levelname}] {asctime} {name} {module} {process:d} {thread:d} {message}',
            'style': '{',
        },
        'simple': {
            'format': '[{levelname}] {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'level': SGGEC_LOG_LEVEL,
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
        'file': {
            'level': 'ERROR',
            'class': 'logging.handlers.RotatingFileHandler',
            'filename': SGGEC_LOG_DIR / 'gec.log',
            'maxBytes': 1024 * 1024 * 10,  # 10 MB
            'backupCount': 5,
            'formatter': 'verbose',
        },
    },
    'loggers': {
        'django': {
            'handlers': ['console', 'file'],
            'level': 'INFO',
            'propagate': False,
        },
        **{
            app: {
                'handlers': ['console', 'file'],
                'level': SGGEC_LOG_LEVEL,
                'propagate': False,
            }
            for app in GEC_APPS
        },
        # Per-step training records get their own JSON-lines handler from the trainer
        'training.records': {
            'handlers': [],
            'level': 'INFO',
            'propagate': False,
        },
    },
    'root': {
        'handlers': ['console'],
        'level': 'WARNING',
    },
}

SGGEC_LOG_DIR.mkdir(parents=True, exist_ok=True)
