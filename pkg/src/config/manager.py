# src/config/manager.py

import os
import logging
from typing import Optional, Any
from functools import lru_cache
from dotenv import load_dotenv
from src.utils.errors import ValidationError
from src.utils.logger import get_logger

logger = get_logger(__name__)


class ConfigManager:
    """Централизованный менеджер настроек приложения (.env + переменные окружения)"""

    _instance: Optional['ConfigManager'] = None

    def __new__(cls) -> 'ConfigManager':
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __init__(self):
        if not hasattr(self, '_initialized'):
            self._load_config()
            self._initialized = True

    @staticmethod
    def _load_config():
        """Загружает настройки из .env файла, если он есть"""
        env_path = os.getenv('SEIAR_ENV_FILE', '.env')

        if not os.path.exists(env_path):
            logger.debug(f"Файл {env_path} не найден, используются переменные окружения и значения по умолчанию")
            return

        try:
            load_dotenv(env_path, override=False)
            logger.debug(f"Настройки загружены из {env_path}")
        except Exception as e:
            raise ValidationError(f"Ошибка загрузки {env_path}: {e}")

    @staticmethod
    def _validate_and_get(
        key: str,
        value_type: type,
        required: bool = True,
        default: Any = None,
        min_value: Optional[float] = None,
        max_value: Optional[float] = None
    ) -> Any:
        """
        Универсальный метод получения и валидации значений из окружения

        Args:
            key: Ключ переменной окружения
            value_type: Тип для преобразования (str, int, float, bool)
            required: Обязательное ли поле
            default: Значение по умолчанию если не required
            min_value: Нижняя граница (строгая, для числовых типов)
            max_value: Верхняя граница (строгая, для числовых типов)

        Returns:
            Значение нужного типа

        Raises:
            ValidationError: Если поле обязательное и отсутствует, или валидация не прошла
        """
        raw_value = os.getenv(key)

        if required and (raw_value is None or raw_value == ''):
            raise ValidationError(f"В окружении отсутствует обязательное поле {key}")

        if not required and (raw_value is None or raw_value == ''):
            return default

        try:
            if value_type == bool:
                converted_value = raw_value.lower() in ('true', '1', 'yes', 'on')
            elif value_type == str:
                converted_value = raw_value
            else:
                converted_value = value_type(raw_value)
        except (ValueError, TypeError) as e:
            raise ValidationError(f"Ошибка преобразования {key} к типу {value_type.__name__}: {e}")

        if value_type in (int, float) and converted_value is not None:
            if min_value is not None and converted_value <= min_value:
                raise ValidationError(f"{key} должен быть больше {min_value}")
            if max_value is not None and converted_value >= max_value:
                raise ValidationError(f"{key} должен быть меньше {max_value}")

        return converted_value

    @lru_cache(maxsize=1)
    def get_logging_config(self) -> dict:
        """Возвращает настройки логирования"""
        level_name = ConfigManager._validate_and_get('LOG_LEVEL', str, required=False, default='INFO').upper()
        level = logging.getLevelName(level_name)

        if not isinstance(level, int):
            raise ValidationError(f"LOG_LEVEL должен быть одним из DEBUG/INFO/WARNING/ERROR, получено: {level_name}")

        return {
            'level': level
        }

    @lru_cache(maxsize=1)
    def get_output_config(self) -> dict:
        """Возвращает настройки вывода результатов"""
        output_dir = ConfigManager._validate_and_get('OUTPUT_DIR', str, required=False, default='.')
        record_stride = ConfigManager._validate_and_get(
            'RECORD_STRIDE',
            int,
            required=False,
            default=10,
            min_value=0
        )

        return {
            'output_dir': output_dir,
            'record_stride': record_stride
        }

    @lru_cache(maxsize=1)
    def get_monitor_config(self) -> dict:
        """Возвращает настройки монитора прогона"""
        interval_days = ConfigManager._validate_and_get(
            'MONITOR_INTERVAL_DAYS',
            float,
            required=False,
            default=5.0,
            min_value=0.0
        )
        debug_checks = ConfigManager._validate_and_get('DEBUG_CHECKS', bool, required=False, default=False)

        return {
            'interval_days': interval_days,
            'debug_checks': debug_checks
        }

    @lru_cache(maxsize=1)
    def get_calibration_config(self) -> dict:
        """Возвращает целевое R0 для калибровки beta"""
        target_r0 = ConfigManager._validate_and_get(
            'TARGET_R0',
            float,
            required=False,
            default=1.8,
            min_value=0.0
        )

        return {
            'target_r0': target_r0
        }

    def clear_cache(self):
        """Очищает кеш всех lru_cache методов"""
        self.get_logging_config.cache_clear()
        self.get_output_config.cache_clear()
        self.get_monitor_config.cache_clear()
        self.get_calibration_config.cache_clear()


config_manager = ConfigManager()
