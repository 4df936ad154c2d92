from .base import *

DATABASES = {
    'default': dj_database_url.parse('sqlite://:memory:'),
}

PASSWORD_HASHERS = ['django.contrib.auth.hashers.MD5PasswordHasher']

CELERY_TASK_ALWAYS_EAGER = True
OUTAGE_MC_BACKEND = 'local'
OUTAGE_DEFAULT_SEED = 20240501
LOG_LEVEL = 'WARNING'
LOGGING['loggers']['apps']['level'] = LOG_LEVEL
