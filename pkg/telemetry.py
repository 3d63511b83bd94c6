import logging
import logging.config
import platform
import sys

from opentelemetry import trace
from opentelemetry.sdk.resources import SERVICE_INSTANCE_ID, SERVICE_NAME, SERVICE_VERSION, Resource
from opentelemetry.sdk.trace import TracerProvider
from opentelemetry.sdk.trace.export import ConsoleSpanExporter, SimpleSpanProcessor
from opentelemetry.trace import Span, Status, StatusCode, Tracer

from connectors import AppConfigClient
from constants import APP_NAME, ENABLE_CONSOLE_TRACING, LOG_LEVEL


class Telemetry:
    """
    Manages logging and the recording of application telemetry.
    """

    log_level: int = logging.WARNING
    tracing_configured: bool = False

    @staticmethod
    def configure_basic(level: int = logging.WARNING):
        # stdout carries the command result, so logs always go to stderr
        logging.basicConfig(
            level=level,
            format='[%(asctime)s] [%(levelname)s] %(name)s: %(message)s',
            force=True,
        )

    @staticmethod
    def configure_tracing(config: AppConfigClient):
        if Telemetry.tracing_configured or not config.get(ENABLE_CONSOLE_TRACING, type=bool):
            return
        resource = Resource.create(
            {
                SERVICE_NAME: APP_NAME,
                SERVICE_VERSION: "1.0.0",
                SERVICE_INSTANCE_ID: platform.node(),
            })
        provider = TracerProvider(resource=resource)
        provider.add_span_processor(SimpleSpanProcessor(ConsoleSpanExporter(out=sys.stderr)))
        trace.set_tracer_provider(provider)
        Telemetry.tracing_configured = True

    @staticmethod
    def get_tracer(name: str) -> Tracer:
        return trace.get_tracer(name)

    @staticmethod
    def record_exception(span: Span, ex: Exception):
        span.set_status(Status(StatusCode.ERROR))
        span.record_exception(ex)

    @staticmethod
    def translate_log_level(log_level: str) -> int:
        level = (log_level or "").strip()
        names = {
            "Debug": logging.DEBUG,
            "Trace": logging.DEBUG,
            "Information": logging.INFO,
            "Warning": logging.WARNING,
            "Error": logging.ERROR,
            "Critical": logging.CRITICAL,
        }
        if level in names:
            return names[level]
        resolved = logging.getLevelName(level.upper())
        return resolved if isinstance(resolved, int) else logging.NOTSET

    @staticmethod
    def configure_logging(config: AppConfigClient):

        Telemetry.log_level = Telemetry.translate_log_level(config.get(LOG_LEVEL, default="WARNING"))

        #Logging configuration
        LOGGING = {
            'version': 1,
            'disable_existing_loggers': False,
            'formatters': {
                'standard': {
                    'format': '[%(asctime)s] [%(levelname)s] %(name)s: %(message)s'
                },
            },
            'handlers': {
                'console': {
                    'level': Telemetry.log_level,
                    'formatter': 'standard',
                    'class': 'logging.StreamHandler',
                    'stream': 'ext://sys.stderr',
                },
            },
            'loggers': {
                'nc_hilbert': {
                    'level': Telemetry.log_level,
                },
            },
            "root": {
                "handlers": ["console"],
                "level": Telemetry.log_level,
            }
        }

        #set the logging configuration
        logging.config.dictConfig(LOGGING)
