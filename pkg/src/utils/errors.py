# src/utils/errors.py

from typing import Optional


class SimulationError(Exception):
    """Базовая ошибка симулятора"""

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message
        self.step: Optional[int] = None

    def at_step(self, step: int) -> 'SimulationError':
        """Прикрепляет индекс шага интегрирования, на котором произошла ошибка"""
        self.step = step
        return self

    def __str__(self) -> str:
        if self.step is None:
            return self.message
        return f"{self.message} (шаг {self.step})"


class NumericalError(SimulationError):
    """Численный сбой: переполнение, вырожденность, несовместность"""


class NonFinite(NumericalError):
    """В состоянии появились NaN/Inf"""


class SingularR(NumericalError):
    """Ковариация шума измерений необратима"""


class BadCovariance(NumericalError):
    """Ковариационная матрица несимметрична или не положительно полуопределена"""


class IllConditioned(NumericalError):
    """KKT система плохо обусловлена"""


class DegenerateDirection(NumericalError):
    """Вектор phi1 вырожден, закон PWMC не определен"""


class Infeasible(NumericalError):
    """Ограничения QP несовместны"""


class EmptyWindow(SimulationError):
    """Окно метрики не содержит ни одной записи"""


class ConfigError(SimulationError):
    """Ошибка конфигурации сценария"""


class ParseError(ConfigError):
    """Ошибка разбора файла сценария"""

    def __init__(self, message: str, line: Optional[int] = None, key: Optional[str] = None):
        location = []
        if line is not None:
            location.append(f"строка {line}")
        if key is not None:
            location.append(f"ключ {key}")
        if location:
            message = f"{message} ({', '.join(location)})"
        super().__init__(message)
        self.line = line
        self.key = key


class ValidationError(ConfigError):
    """Нарушен инвариант конфигурации"""

    def __init__(self, invariant: str):
        super().__init__(invariant)
        self.invariant = invariant


class IoError(SimulationError):
    """Ошибка записи результатов"""
