# src/config/validation.py

from typing import Any, Dict, Type, TypeVar
import pydantic
from src.utils.errors import ValidationError

ModelT = TypeVar('ModelT', bound=pydantic.BaseModel)


def build_model(model_cls: Type[ModelT], data: Dict[str, Any], prefix: str = '') -> ModelT:
    """
    Валидирует данные в pydantic модель, переводя ошибки в ValidationError

    Сообщение называет поле (через точку, с префиксом секции) и нарушенное условие.
    """
    try:
        return model_cls.model_validate(data)
    except pydantic.ValidationError as e:
        problems = []
        for error in e.errors():
            location = '.'.join(str(part) for part in error['loc'])
            if prefix:
                location = f"{prefix}.{location}" if location else prefix
            message = error['msg'].removeprefix('Value error, ')
            problems.append(f"{location}: {message}" if location else message)
        raise ValidationError('; '.join(problems)) from e
