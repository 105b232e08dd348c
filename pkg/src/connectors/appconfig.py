import os
import json
import logging

from typing import Any, Optional
from dotenv import load_dotenv

from constants import SETTINGS_FILE_ENV


class AppConfigClient:

    def __init__(self, settings_file: Optional[str] = None):
        """
        Resolves keys from the process environment first (after loading a .env file),
        then from an optional JSON settings file, then from the caller's default.
        """
        load_dotenv(override=False)

        self.client = {}
        self.settings_file = settings_file or os.environ.get(SETTINGS_FILE_ENV)

        if not self.settings_file:
            logging.debug("[appconfig] No settings file configured; using environment and defaults.")
            return

        try:
            with open(self.settings_file, "r", encoding="utf-8") as f:
                loaded = json.load(f)
            if not isinstance(loaded, dict):
                raise ValueError("settings file must hold a JSON object")
            self.client = {str(k): v for k, v in loaded.items()}
            logging.info("[appconfig] Loaded %d keys from %s.", len(self.client), self.settings_file)
        except FileNotFoundError:
            logging.warning("[appconfig] Settings file %s not found; skipping it.", self.settings_file)
        except (ValueError, json.JSONDecodeError) as e:
            logging.warning("[appconfig] Settings file %s unreadable (%s); skipping it.", self.settings_file, e)

    def get(self, key: str, default: Any = None, type: type = str) -> Any:
        return self.get_value(key, default=default, allow_none=False, type=type)

    def get_value(self, key: str, default: Any = None, allow_none: bool = False, type: type = str) -> Any:

        if key is None:
            raise ValueError('The key parameter is required for get_value().')

        value = os.environ.get(key)
        if value is None:
            value = self.client.get(key)

        if value is not None:
            if type is not None:
                if type is bool:
                    if isinstance(value, str):
                        value = value.strip().lower() in ['true', '1', 'yes']
                    else:
                        value = bool(value)
                else:
                    try:
                        value = type(value)
                    except (TypeError, ValueError) as e:
                        raise ValueError(f'Value for {key} could not be converted to {type.__name__}. Error: {e}')
            return value

        if default is not None or allow_none is True:
            return default

        raise KeyError(f'The configuration variable {key} not found.')

    # Helper for boolean flags
    def read_env_boolean(self, var_name, default=False):
        value = str(self.get_value(var_name, str(default))).strip().lower()
        return value in ['true', '1', 'yes']
