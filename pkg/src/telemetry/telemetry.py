import os
import logging
import logging.config
import platform

from opentelemetry import trace
from opentelemetry.sdk.resources import SERVICE_NAME, Resource, SERVICE_INSTANCE_ID, SERVICE_VERSION, SERVICE_NAMESPACE
from opentelemetry.sdk.trace import TracerProvider
from opentelemetry.sdk.trace.export import ConsoleSpanExporter, SimpleSpanProcessor
from opentelemetry.trace import Span, Status, StatusCode, Tracer

from connectors.appconfig import AppConfigClient
from constants import APP_NAME, APP_VERSION, ENABLE_CONSOLE_LOGGING, LOG_LEVEL, TRACE_EXPORTER

# Libraries that log at INFO on every call
NOISY_LOGGERS = ("joblib", "numexpr", "matplotlib", "httpx", "httpcore", "opentelemetry")


class NoisyLibraryFilter(logging.Filter):
    """Drops records below WARNING from chatty third-party loggers unless the root logger is in DEBUG."""

    def filter(self, record):
        if record.levelno >= logging.WARNING:
            return True
        if logging.getLogger().getEffectiveLevel() == logging.DEBUG:
            return True
        return not record.name.startswith(NOISY_LOGGERS)


class Telemetry:
    """
    Manages logging and tracing for the CLI, the harness and the HTTP service.
    """

    log_level: int = logging.WARNING
    tracing_enabled: bool = False
    api_name: str = None

    @staticmethod
    def configure_basic(config: AppConfigClient):
        level = Telemetry.translate_log_level(config.get(LOG_LEVEL, 'INFO'))

        # force=True avoids duplicate handlers when uvicorn reloads
        logging.basicConfig(
            level=level,
            format="%(asctime)s [%(levelname)s] %(message)s",
            datefmt="%Y-%m-%d %H:%M:%S",
            force=True,
        )

        for name in NOISY_LOGGERS:
            logging.getLogger(name).setLevel(max(level, logging.WARNING))

    @staticmethod
    def configure_tracing(config: AppConfigClient, api_name: str = APP_NAME):
        """
        Installs an SDK tracer provider when TRACE_EXPORTER=console.
        Otherwise the API's no-op tracer stays in place.
        """
        exporter = str(config.get(TRACE_EXPORTER, default="none")).strip().lower()
        if exporter != "console":
            logging.debug("[telemetry] Tracing disabled (TRACE_EXPORTER=%s).", exporter)
            return

        Telemetry.api_name = api_name
        resource = Resource.create(
            {
                SERVICE_NAME: f"{Telemetry.api_name}",
                SERVICE_NAMESPACE: api_name,
                SERVICE_VERSION: APP_VERSION,
                SERVICE_INSTANCE_ID: f"{platform.node()}"
            })
        provider = TracerProvider(resource=resource)
        provider.add_span_processor(SimpleSpanProcessor(ConsoleSpanExporter()))
        trace.set_tracer_provider(provider)
        Telemetry.tracing_enabled = True
        logging.info("[telemetry] Console span exporter enabled.")

    @staticmethod
    def get_tracer(name: str) -> Tracer:
        return trace.get_tracer(name)

    @staticmethod
    def record_exception(span: Span, ex: Exception):
        span.set_status(Status(StatusCode.ERROR))
        span.record_exception(ex)

    @staticmethod
    def translate_log_level(log_level: str) -> int:
        """Map a variety of input strings to logging levels.

        Accepts standard names (DEBUG, INFO, WARNING, ERROR, CRITICAL, NOTSET),
        common synonyms (Trace -> DEBUG, Information -> INFO), and integers.
        Case-insensitive.
        """
        if log_level is None:
            return logging.INFO
        if isinstance(log_level, int):
            return int(log_level)
        s = str(log_level).strip()
        std = getattr(logging, s.upper(), None)
        if isinstance(std, int):
            return std
        synonyms = {
            "trace": logging.DEBUG,
            "information": logging.INFO,
        }
        return synonyms.get(s.lower(), logging.INFO)

    @staticmethod
    def configure_logging(config: AppConfigClient):
        Telemetry.log_level = Telemetry.translate_log_level(
            config.get(LOG_LEVEL, default="INFO")
        )
        enable_console_logging = config.read_env_boolean(ENABLE_CONSOLE_LOGGING, default=True)

        LOGGING = {
            'version': 1,
            'disable_existing_loggers': False,
            'formatters': {
                'standard': {
                    'format': '[%(asctime)s] [%(levelname)s] %(name)s: %(message)s'
                },
                'error': {
                    'format': '[%(asctime)s] [%(levelname)s] %(name)s %(process)d::%(module)s|%(lineno)s:: %(message)s'
                }
            },
            'handlers': {
                'console': {
                    'level': Telemetry.log_level,
                    'formatter': 'standard',
                    'class': 'logging.StreamHandler',
                    'filters': ['noisy_libraries'],
                    'stream': 'ext://sys.stderr'
                },
                'errors': {
                    'level': logging.ERROR,
                    'formatter': 'error',
                    'class': 'logging.StreamHandler',
                    'stream': 'ext://sys.stderr'
                },
            },
            'filters': {
                'noisy_libraries': {
                    '()': 'telemetry.NoisyLibraryFilter',
                },
            },
            "root": {
                "handlers": ["console"],
                "level": Telemetry.log_level,
            }
        }

        # Without console logging only errors reach stderr
        if not enable_console_logging:
            LOGGING['root']['handlers'] = ["errors"]

        logging.config.dictConfig(LOGGING)

    @staticmethod
    def log_log_level_diagnostics(config: AppConfigClient) -> None:
        """Log the resolved LOG_LEVEL and the effective root logger level."""
        lvl_env = os.getenv(LOG_LEVEL)
        if lvl_env:
            src = "env"
            resolved = lvl_env.strip().upper()
        else:
            cfg_val = config.get_value(LOG_LEVEL, default=None, allow_none=True)
            if cfg_val:
                src = "settings"
                resolved = str(cfg_val).strip().upper()
            else:
                src = "default"
                resolved = "INFO"

        logging.getLogger().debug("Resolved LOG_LEVEL=%s (source=%s)", resolved, src)
        logging.getLogger().debug(
            "Effective root logger level: %s",
            logging.getLevelName(logging.getLogger().getEffectiveLevel()),
        )
