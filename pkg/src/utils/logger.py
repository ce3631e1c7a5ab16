# src/utils/logger.py

import logging
import sys
import os
from datetime import datetime
from typing import Optional


class MillisecondFormatter(logging.Formatter):
    """Форматтер с миллисекундами (3 цифры)"""

    def formatTime(self, record, datefmt=None):
        if datefmt:
            s = datetime.fromtimestamp(record.created).strftime(datefmt)
            s = f"{s}.{int(record.msecs):03d}"
        else:
            s = datetime.fromtimestamp(record.created).strftime("%Y-%m-%d %H:%M:%S")
            s = f"{s}.{int(record.msecs):03d}"
        return s


_FORMAT = '%(asctime)s | %(levelname)-8s | %(name)-40s | %(message)s'
_DATEFMT = '%d-%m-%y %H:%M:%S'


def _resolve_level(level: Optional[int]) -> int:
    if level is not None:
        return level

    raw = os.getenv('LOG_LEVEL', 'INFO').upper()
    resolved = logging.getLevelName(raw)
    return resolved if isinstance(resolved, int) else logging.INFO


def get_logger(name: str, level: Optional[int] = None) -> logging.Logger:
    """
    Создает логгер с выводом в stderr и (опционально) в файл

    Args:
        name: Имя логгера
        level: Уровень логирования (по умолчанию LOG_LEVEL из окружения)

    Returns:
        Настроенный логгер
    """
    logger = logging.getLogger(name)

    if logger.handlers:
        return logger

    level = _resolve_level(level)
    logger.setLevel(level)

    formatter = MillisecondFormatter(fmt=_FORMAT, datefmt=_DATEFMT)

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(level)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    logs_dir = os.getenv('LOG_DIR')
    if logs_dir:
        if not os.path.exists(logs_dir):
            os.makedirs(logs_dir)

        current_date = datetime.now().strftime('%Y-%m-%d')
        log_file_path = os.path.join(logs_dir, f"{current_date}.log")

        file_handler = logging.FileHandler(log_file_path, mode='a', encoding='utf-8')
        file_handler.setLevel(level)
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    logger.propagate = False

    return logger


def set_log_level(level: int) -> None:
    """
    Устанавливает уровень логирования для всех логгеров проекта

    Args:
        level: Уровень логирования
    """
    root_logger = logging.getLogger()
    root_logger.setLevel(level)

    for handler in root_logger.handlers:
        handler.setLevel(level)

    for name in list(logging.root.manager.loggerDict):
        if not name.startswith('src'):
            continue
        logger = logging.getLogger(name)
        logger.setLevel(level)
        for handler in logger.handlers:
            handler.setLevel(level)
