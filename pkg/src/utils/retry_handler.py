# src/utils/retry_handler.py

import logging
from functools import wraps
from tenacity import (
    retry,
    stop_after_attempt,
    wait_exponential,
    retry_if_exception_type,
    before_sleep_log
)
from src.utils.errors import IoError
from src.utils.logger import get_logger

logger = get_logger(__name__)


def retry_on_io_error(
        max_attempts: int = 3,
        min_wait: float = 0.1,
        max_wait: float = 1.0
):
    """
    Декоратор для повтора записи файлов при временных ошибках ввода-вывода

    Использует exponential backoff: 0.1s, 0.2s, 0.4s (до max_wait).
    После исчерпания попыток OSError превращается в IoError.

    Args:
        max_attempts: Максимальное количество попыток (по умолчанию 3)
        min_wait: Минимальная задержка между попытками в секундах
        max_wait: Максимальная задержка между попытками в секундах
    """

    def decorator(func):
        retrying = retry(
            stop=stop_after_attempt(max_attempts),
            wait=wait_exponential(multiplier=min_wait, min=min_wait, max=max_wait),
            retry=retry_if_exception_type(OSError),
            before_sleep=before_sleep_log(logger, logging.WARNING),
            reraise=True
        )(func)

        @wraps(func)
        def wrapper(*args, **kwargs):
            try:
                return retrying(*args, **kwargs)
            except OSError as e:
                raise IoError(f"Ошибка записи: {e}") from e

        return wrapper

    return decorator
