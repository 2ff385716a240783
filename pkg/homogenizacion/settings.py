# homogenizacion/settings.py

import os
from pathlib import Path

import dj_database_url
from dotenv import load_dotenv

load_dotenv()

BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = os.getenv("SECRET_KEY", "dev-key")
DEBUG = os.getenv("DEBUG", "1") in ["1", "True", "true"]
ALLOWED_HOSTS = os.getenv("ALLOWED_HOSTS", "localhost,127.0.0.1").split(",")

INSTALLED_APPS = [
    "django.contrib.admin",
    "django.contrib.auth",
    "django.contrib.contenttypes",
    "django.contrib.sessions",
    "django.contrib.messages",
    "django.contrib.staticfiles",
    "rest_framework",
    "drf_spectacular",
    "django_filters",
    "core",
    "cell_mesh",
    "rheology",
    "fem_stokes",
    "homogenize",
    "channel_oracle",
    "experiments",
]

MIDDLEWARE = [
    "django.middleware.security.SecurityMiddleware",
    "django.contrib.sessions.middleware.SessionMiddleware",
    "django.middleware.common.CommonMiddleware",
    "django.middleware.csrf.CsrfViewMiddleware",
    "django.contrib.auth.middleware.AuthenticationMiddleware",
    "django.contrib.messages.middleware.MessageMiddleware",
    "django.middleware.clickjacking.XFrameOptionsMiddleware",
]

ROOT_URLCONF = "homogenizacion.urls"

TEMPLATES = [
    {
        "BACKEND": "django.template.backends.django.DjangoTemplates",
        "DIRS": [],
        "APP_DIRS": True,
        "OPTIONS": {
            "context_processors": [
                "django.template.context_processors.debug",
                "django.template.context_processors.request",
                "django.contrib.auth.context_processors.auth",
                "django.contrib.messages.context_processors.messages",
            ],
        },
    },
]

WSGI_APPLICATION = "homogenizacion.wsgi.application"

REST_FRAMEWORK = {
    "DEFAULT_SCHEMA_CLASS": "drf_spectacular.openapi.AutoSchema",
    "DEFAULT_FILTER_BACKENDS": (
        "django_filters.rest_framework.DjangoFilterBackend",
    ),
    "DEFAULT_PERMISSION_CLASSES": (
        "rest_framework.permissions.AllowAny",
    ),
    "DEFAULT_PAGINATION_CLASS": "rest_framework.pagination.PageNumberPagination",
    "PAGE_SIZE": 50,
}

SPECTACULAR_SETTINGS = {
    "TITLE": "Homogenización API",
    "DESCRIPTION": "Corridas registradas de los comandos de homogenización",
    "VERSION": "1.0.0",
    "SERVE_INCLUDE_SCHEMA": False,
}

TIME_ZONE = "America/La_Paz"
LANGUAGE_CODE = "es"
USE_TZ = True

DATABASES = {
    "default": dj_database_url.config(
        default=f"sqlite:///{BASE_DIR / 'db.sqlite3'}",
        conn_max_age=600,
    )
}

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"

STATIC_URL = "/static/"
STATIC_ROOT = BASE_DIR / "staticfiles"


def _env(nombre, defecto, tipo=float):
    valor = os.getenv(nombre)
    return defecto if valor in (None, "") else tipo(valor)


# Valores por defecto numéricos; cada uno se puede sobrescribir con la variable de entorno homónima.
HOMOGENIZACION = {
    "ETA_0": _env("ETA_0", 1.0),
    "ETA_INF": _env("ETA_INF", 1e-3),
    "LAMBDA": _env("LAMBDA", 1.0),
    "DELTA_REG": _env("DELTA_REG", 1e-6),
    "CLEARANCE": _env("CLEARANCE", 0.05),
    "N_SEG": _env("N_SEG", 64, int),
    "H": _env("H", 0.08),
    "N_LAYERS": _env("N_LAYERS", 8, int),
    "SADDLE_TOL": _env("SADDLE_TOL", 1e-10),
    "PICARD_MAX_ITER": _env("PICARD_MAX_ITER", 100, int),
    "PICARD_TOL_REL": _env("PICARD_TOL_REL", 1e-8),
    "PICARD_RELAX": _env("PICARD_RELAX", 1.0),
    "THREADS": _env("THREADS", 1, int),
    "OUTPUT_DIR": _env("OUTPUT_DIR", BASE_DIR / "resultados", Path),
}

# Logging configuration
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {name} {process:d} {thread:d} {message}',
            'style': '{',
        },
        'simple': {
            'format': '{levelname} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'file': {
            'level': 'INFO',
            'class': 'logging.handlers.RotatingFileHandler',
            'filename': BASE_DIR / 'logs' / 'homogenizacion.log',
            'maxBytes': 5 * 1024 * 1024,
            'backupCount': 3,
            'encoding': 'utf-8',
            'formatter': 'verbose',
        },
        'console': {
            'level': os.getenv('LOG_LEVEL', 'INFO'),
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
    },
    'loggers': {
        **{
            app: {
                'handlers': ['file', 'console'],
                'level': 'DEBUG' if DEBUG else 'INFO',
                'propagate': False,
            }
            for app in ('core', 'cell_mesh', 'rheology', 'fem_stokes', 'homogenize', 'channel_oracle', 'experiments')
        },
        'django': {
            'handlers': ['file'],
            'level': 'INFO',
            'propagate': True,
        },
    },
}

# Crear directorio de logs si no existe
(BASE_DIR / 'logs').mkdir(exist_ok=True)
