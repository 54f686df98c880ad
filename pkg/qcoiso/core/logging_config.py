import logging.config
import sys
import structlog
from structlog.types import Processor
from qcoiso.core.config import settings

# Loggers that report every cache hit and basis computation; kept quiet unless debugging
CHATTY_LOGGERS = ('qcoiso.db.basis_cache', 'qcoiso.services.uqalg')

def setup_logging(level: str | None = None):
    """Configures structlog and stdlib logging; ``level`` overrides settings.LOG_LEVEL (the CLI's --log-level)."""
    log_level = (level or settings.LOG_LEVEL).upper()
    debugging = log_level == 'DEBUG'

    # --- structlog processors, applied in order ---
    shared_processors: list[Processor] = [
        structlog.contextvars.merge_contextvars, # command / case bound by bind_run_context
        structlog.stdlib.add_logger_name,
        structlog.stdlib.add_log_level,
        structlog.stdlib.PositionalArgumentsFormatter(),
        structlog.processors.TimeStamper(fmt='iso'),
        structlog.processors.StackInfoRenderer(),
        structlog.processors.format_exc_info,
        structlog.processors.UnicodeDecoder(),
    ]

    # Human readable output while debugging, JSON lines otherwise
    if debugging:
        processors = shared_processors + [
            structlog.dev.ConsoleRenderer(),
        ]
    else:
        processors = shared_processors + [
            structlog.processors.dict_tracebacks, # tracebacks stay machine readable
            structlog.processors.JSONRenderer(),
        ]

    # --- stdlib integration ---
    # Logs go to stderr: stdout carries the report of the CLI
    loggers = {
        '': {
            'handlers': ['default'],
            'level': log_level,
            'propagate': True,
        },
    }
    for name in CHATTY_LOGGERS:
        loggers[name] = {
            'handlers': ['default'],
            'level': log_level if debugging else 'WARNING', # the handler still filters at log_level
            'propagate': False,
        }

    logging.config.dictConfig({
        'version': 1,
        'disable_existing_loggers': False,
        'formatters': {
            'json_formatter': {
                '()': structlog.stdlib.ProcessorFormatter,
                'processor': structlog.processors.JSONRenderer(),
                'foreign_pre_chain': shared_processors,
            },
            'console_formatter': {
                '()': structlog.stdlib.ProcessorFormatter,
                'processor': structlog.dev.ConsoleRenderer(),
                'foreign_pre_chain': shared_processors,
            },
        },
        'handlers': {
            'default': {
                'level': log_level,
                'class': 'logging.StreamHandler',
                'formatter': 'console_formatter' if debugging else 'json_formatter',
                'stream': sys.stderr,
            },
        },
        'loggers': loggers,
    })

    # --- structlog itself ---
    structlog.configure(
        processors=processors,
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=True,
    )


def bind_run_context(**values):
    """Attaches run-wide fields (command, case) to every later log event of this run."""
    structlog.contextvars.clear_contextvars()
    structlog.contextvars.bind_contextvars(**values)
