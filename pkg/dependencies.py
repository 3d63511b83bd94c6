"""
Provides dependencies for command handlers.
"""
import logging
from typing import Any, Dict, Optional

from connectors.appconfig import AppConfigClient
from constants import EXIT_DOMAIN_ERROR

__config: AppConfigClient = None


logger = logging.getLogger("nc_hilbert.dependencies")


class CommandError(Exception):
    """A failed command: the message, the offending path and the process exit code."""

    def __init__(self, message: str, exit_code: int = EXIT_DOMAIN_ERROR, path: Optional[str] = None):
        super().__init__(message)
        self.message = message
        self.exit_code = exit_code
        self.path = path


def get_config(action: str = None, settings_file: Optional[str] = None,
               overrides: Optional[Dict[str, Any]] = None) -> AppConfigClient:
    global __config

    if action is not None and action == 'refresh':
        logger.info("Refreshing configuration client on demand")
        __config = AppConfigClient(settings_file, overrides)
    else:
        __config = __config or AppConfigClient(settings_file, overrides)
        if __config and action is None:
            logger.debug("Using cached configuration client")

    return __config


def handle_exception(exception: Exception, exit_code: int = EXIT_DOMAIN_ERROR):
    logger.error("Command failure encountered", exc_info=exception)
    raise CommandError(
        getattr(exception, "message", str(exception)),
        exit_code=getattr(exception, "exit_code", exit_code),
        path=getattr(exception, "path", None),
    ) from exception
