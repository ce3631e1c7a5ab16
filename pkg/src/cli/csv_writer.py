# src/cli/csv_writer.py

import csv
import os
from typing import Dict, List, Optional, Sequence
from dotenv import dotenv_values
from src.simulation.types import RunMetrics, StepRecord
from src.utils.retry_handler import retry_on_io_error
from src.utils.logger import get_logger

logger = get_logger(__name__)

CSV_HEADER = (
    't', 'z1', 'z2', 'z3', 'z4', 'z5',
    'zhat1', 'zhat2', 'zhat3', 'zhat4', 'zhat5',
    'y1', 'y2', 'u1', 'u2', 'h', 'nu', 'V', 'e1', 'e2',
)


def _format(value) -> str:
    """Кратчайшее десятичное представление, точно восстанавливающее float"""
    return repr(float(value))


def _row(record: StepRecord) -> List[str]:
    values = [record.t, *record.z, *record.z_hat, *record.y, *record.u, record.h, record.nu, record.V, *record.e]
    return [_format(v) for v in values]


def _ensure_parent(path: str):
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)


@retry_on_io_error()
def emit_csv(records: Sequence[StepRecord], path: str) -> None:
    """
    Записывает траекторию в CSV: заголовок и строка на каждую запись

    Raises:
        IoError: Если файл не удалось записать
    """
    _ensure_parent(path)
    with open(path, 'w', encoding='utf-8', newline='') as stream:
        writer = csv.writer(stream, lineterminator='\n')
        writer.writerow(CSV_HEADER)
        for record in records:
            writer.writerow(_row(record))

    logger.debug(f"CSV записан: {path} ({len(records)} строк)")


def read_csv(path: str) -> List[Dict[str, float]]:
    """Читает CSV траектории обратно в словари float"""
    with open(path, 'r', encoding='utf-8', newline='') as stream:
        reader = csv.DictReader(stream)
        return [{key: float(value) for key, value in row.items()} for row in reader]


def flatten_metrics(metrics: RunMetrics, prefix: str = '') -> Dict[str, str]:
    """Плоские пары ключ-значение: кортежи раскрываются в .full/.steady или .1/.2"""
    flat: Dict[str, str] = {}
    for name, value in metrics.model_dump().items():
        key = f"{prefix}{name}"
        if name in ('rmse_tracking', 'rmse_estimation'):
            flat[f"{key}.full"] = _format(value[0])
            flat[f"{key}.steady"] = _format(value[1])
        elif isinstance(value, (tuple, list)):
            for idx, item in enumerate(value, start=1):
                flat[f"{key}.{idx}"] = _format(item)
        elif isinstance(value, bool):
            flat[key] = 'true' if value else 'false'
        elif value is None:
            flat[key] = 'none'
        elif isinstance(value, int):
            flat[key] = str(value)
        else:
            flat[key] = _format(value)
    return flat


@retry_on_io_error()
def write_metrics(metrics_by_prefix: Dict[str, RunMetrics], path: str) -> None:
    """
    Записывает метрики одной или нескольких прогонов строками key=value

    Args:
        metrics_by_prefix: {'' : metrics} для одного прогона или {'emckf.': ..., 'ekf.': ...}
        path: Путь к файлу
    """
    _ensure_parent(path)
    with open(path, 'w', encoding='utf-8', newline='') as stream:
        for prefix, metrics in metrics_by_prefix.items():
            for key, value in flatten_metrics(metrics, prefix).items():
                stream.write(f"{key}={value}\n")

    logger.debug(f"Метрики записаны: {path}")


def read_metrics(path: str) -> Dict[str, str]:
    """Читает файл метрик в словарь строк"""
    return {key: value for key, value in dotenv_values(path).items() if value is not None}


def digest(metrics: RunMetrics, label: Optional[str] = None) -> str:
    """Однострочная сводка для stdout"""
    day = f"{metrics.converge_day:.2f}" if metrics.converge_day is not None else "none"
    head = f"{label}: " if label else ""
    return (
        f"{head}converge_day={day} rmse_est={metrics.rmse_estimation[0]:.3f} "
        f"rmse_track={metrics.rmse_tracking[0]:.3f} u_max={metrics.u_max[0]:.3f},{metrics.u_max[1]:.3f} "
        f"h_max={metrics.h_max:.3e} clamps={metrics.clamp_total}"
    )
