"""
Django development settings for the GEC toolkit.
"""

from .base import *

DEBUG = True

# Stack traces from the numerics stay readable with the verbose format
LOGGING['handlers']['console']['formatter'] = 'verbose'
