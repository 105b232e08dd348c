"""
Provides dependencies for the CLI and the HTTP service.
"""
import json
import logging

from fastapi import HTTPException, Header
from pydantic import ValidationError

from connectors.appconfig import AppConfigClient
from constants import EXIT_INVALID_SPEC, EXIT_NUMERIC_FAILURE, SERVICE_APIKEY
from util.errors import (
    InvalidArgumentError,
    InvalidSpecError,
    NumericError,
    UnsupportedModelError,
)

__config: AppConfigClient = None

INVALID_INPUT_ERRORS = (ValidationError, InvalidSpecError, InvalidArgumentError, json.JSONDecodeError)


def get_config(action: str = None) -> AppConfigClient:
    global __config

    if action == "refresh":
        __config = AppConfigClient()
    elif __config is None:
        __config = AppConfigClient()

    return __config


async def validate_auth(x_api_key: str = Header(None, alias="X-API-KEY")):
    """
    Checks X-API-KEY against KNN_SERVICE_APIKEY when one is configured.
    The service is open when no key is configured.
    """
    expected_api_key = get_config().get_value(SERVICE_APIKEY, default=None, allow_none=True)
    if not expected_api_key:
        return True

    if not x_api_key:
        raise HTTPException(status_code=401, detail="Missing credentials. Provide X-API-KEY")

    if x_api_key != expected_api_key:
        logging.error("[auth] Invalid API key")
        raise HTTPException(status_code=401, detail="Invalid API key")

    return True


def exit_code_for(exception: Exception) -> int:
    """CLI exit code for a known failure, or None when the exception is unexpected."""
    if isinstance(exception, INVALID_INPUT_ERRORS):
        return EXIT_INVALID_SPEC
    if isinstance(exception, NumericError):
        return EXIT_NUMERIC_FAILURE
    return None


def handle_exception(exception: Exception) -> int:
    """
    Maps an exception raised by a CLI command to its exit code.
    Unexpected exceptions are logged with their traceback and re-raised.
    """
    code = exit_code_for(exception)
    if code is None:
        logging.error(exception, stack_info=True, exc_info=True)
        raise exception
    logging.error("[cli] %s: %s", type(exception).__name__, exception)
    return code


def handle_http_exception(exception: Exception):
    """Maps the same failure families to HTTP status codes for the service."""
    if isinstance(exception, INVALID_INPUT_ERRORS):
        status_code = 400
    elif isinstance(exception, (NumericError, UnsupportedModelError)):
        status_code = 422
    else:
        logging.error(exception, stack_info=True, exc_info=True)
        status_code = 500
    raise HTTPException(
        status_code=status_code,
        detail=str(exception)
    ) from exception
