import logging

import structlog

from qcoiso.core.logging_config import CHATTY_LOGGERS, bind_run_context, setup_logging


def test_chatty_loggers_are_quiet_outside_debug():
    setup_logging('INFO')
    for name in CHATTY_LOGGERS:
        assert logging.getLogger(name).level == logging.WARNING
    assert logging.getLogger().level == logging.INFO


def test_chatty_loggers_follow_debug():
    setup_logging('DEBUG')
    for name in CHATTY_LOGGERS:
        assert logging.getLogger(name).level == logging.DEBUG
    setup_logging('INFO')


def test_run_context_replaces_earlier_fields():
    bind_run_context(command='verify', case='A2 L1-L3')
    bind_run_context(command='roots')
    assert structlog.contextvars.get_contextvars() == {'command': 'roots'}
    structlog.contextvars.clear_contextvars()
