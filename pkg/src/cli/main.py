# src/cli/main.py

import argparse
import logging
import os
from typing import List, Optional
from src.cli.config_loader import load_config
from src.cli.csv_writer import digest, emit_csv, write_metrics
from src.cli.presets import DEFAULT_SEED, Preset, build_preset
from src.config.manager import config_manager
from src.simulation.batch import compare_filters
from src.simulation.runner import run
from src.simulation.types import ScenarioConfig
from src.utils.errors import ConfigError, IoError, SimulationError, ValidationError
from src.utils.logger import get_logger, set_log_level

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2


class _ArgumentParser(argparse.ArgumentParser):
    """argparse, сообщающий об ошибках через ConfigError вместо sys.exit(2)"""

    def error(self, message):
        raise ValidationError(f"аргументы командной строки: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog='seiar-sim',
        description="Замкнутая симуляция SEIAR: EMCKF оценка и QP-RCLF управление"
    )
    source = parser.add_mutually_exclusive_group()
    source.add_argument('--preset', help=f"пресет сценария ({', '.join(p.value for p in Preset)})")
    source.add_argument('--config', help="файл сценария в синтаксисе .env")

    parser.add_argument('--seed', type=int, default=None, help=f"seed (по умолчанию {DEFAULT_SEED})")
    parser.add_argument('--beta', type=float, default=None, help="скорость заражения β")
    parser.add_argument('--out', default=None, help="путь CSV траектории")
    parser.add_argument('--metrics', default=None, help="путь файла метрик")
    parser.add_argument('--compare-filters', action='store_true', help="прогоны EMCKF и EKF с одним шумом")
    parser.add_argument('--days', type=float, default=None, help="горизонт, сутки")
    parser.add_argument('--dt', type=float, default=None, help="шаг интегрирования, сутки")
    parser.add_argument('--stride', type=int, default=None, help="шагов на строку CSV")
    parser.add_argument('--log-level', default=None, help="DEBUG/INFO/WARNING/ERROR")
    return parser


def _scenario(args: argparse.Namespace) -> ScenarioConfig:
    if args.config:
        cfg = load_config(args.config, seed=args.seed, beta=args.beta)
    else:
        seed = DEFAULT_SEED if args.seed is None else args.seed
        cfg = build_preset(args.preset or Preset.NOMINAL.value, seed=seed, beta=args.beta)

    changes = {}
    if args.days is not None:
        changes['horizon'] = args.days
    if args.dt is not None:
        changes['dt'] = args.dt
    if args.stride is not None:
        changes['record_stride'] = args.stride
    elif args.config is None:
        changes['record_stride'] = config_manager.get_output_config()['record_stride']

    return cfg.replaced(**changes) if changes else cfg


def _paths(args: argparse.Namespace):
    out = args.out or os.path.join(config_manager.get_output_config()['output_dir'], 'run.csv')
    metrics = args.metrics or f"{os.path.splitext(out)[0]}.metrics"
    return out, metrics


def main(argv: Optional[List[str]] = None) -> int:
    """
    Точка входа командной строки

    Returns:
        0 при успехе, 1 при ошибке конфигурации, 2 при численном сбое или ошибке записи
    """
    try:
        args = build_parser().parse_args(argv)

        set_log_level(config_manager.get_logging_config()['level'])
        if args.log_level:
            level = logging.getLevelName(args.log_level.upper())
            if not isinstance(level, int):
                raise ValidationError(f"--log-level: неизвестный уровень {args.log_level}")
            set_log_level(level)

        cfg = _scenario(args)
        out, metrics_path = _paths(args)

        if args.compare_filters:
            comparison = compare_filters(cfg)
            base, ext = os.path.splitext(out)
            emit_csv(comparison.emckf[0], f"{base}_emckf{ext}")
            emit_csv(comparison.ekf[0], f"{base}_ekf{ext}")
            write_metrics({'emckf.': comparison.emckf[1], 'ekf.': comparison.ekf[1]}, metrics_path)
            print(digest(comparison.emckf[1], 'emckf'))
            print(digest(comparison.ekf[1], 'ekf'))
        else:
            records, metrics = run(cfg)
            emit_csv(records, out)
            write_metrics({'': metrics}, metrics_path)
            print(digest(metrics))

    except ConfigError as e:
        logger.error(f"Ошибка конфигурации: {e}")
        return EXIT_CONFIG
    except IoError as e:
        logger.error(f"Ошибка записи результатов: {e}")
        return EXIT_RUNTIME
    except SimulationError as e:
        logger.error(f"Численный сбой: {e}")
        return EXIT_RUNTIME

    return EXIT_OK
