import logging
import os
from typing import Any, Dict, Optional

from dotenv import dotenv_values

from constants import DEFAULTS, ENVIRONMENT_KEYS, TRUE_VALUES
from nchilbert.exceptions import ConfigurationError

logger = logging.getLogger("nc_hilbert.config")


class AppConfigClient:

    def __init__(self, settings_file: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None):
        """
        Loads settings in precedence order: explicit overrides (CLI flags),
        the whitelisted environment keys, the settings file, the defaults.

        :param settings_file: path of a dotenv-format settings file (optional)
        :param overrides: values given on the command line; None entries are ignored
        """
        self.settings_file = settings_file
        self.file_values: Dict[str, Optional[str]] = {}

        if settings_file:
            if not os.path.isfile(settings_file):
                raise ConfigurationError(f"Settings file {settings_file} not found.", settings_file)
            # values are read into memory only, never exported to os.environ
            self.file_values = dotenv_values(settings_file)
            logger.debug("[config][%s] Loaded %d settings", settings_file, len(self.file_values))

        self.overrides = {k: v for k, v in (overrides or {}).items() if v is not None}

    def get(self, key: str, default: Any = None, type: type = str) -> Any:
        return self.get_value(key, default=default, allow_none=False, type=type)

    def get_value(self, key: str, default: Any = None, allow_none: bool = False, type: type = str) -> Any:

        if key is None:
            raise ConfigurationError('The key parameter is required for get_value().')

        value = self.overrides.get(key)

        if value is None and key in ENVIRONMENT_KEYS:
            value = os.environ.get(key)

        if value is None:
            value = self.file_values.get(key)

        if value is None:
            value = DEFAULTS.get(key)

        if value is not None:
            if type is not None:
                if type is bool:
                    if isinstance(value, str):
                        value = value.strip().lower() in TRUE_VALUES
                    else:
                        value = bool(value)
                else:
                    try:
                        value = type(value)
                    except (TypeError, ValueError) as e:
                        raise ConfigurationError(
                            f'Value for {key} could not be converted to {type.__name__}. Error: {e}'
                        ) from e
            return value
        else:
            if default is not None or allow_none is True:
                return default

            raise ConfigurationError(f'The configuration variable {key} not found.')
