# src/cli/config_loader.py

from typing import Any, Callable, Dict, List, Optional, Tuple
from dotenv.parser import parse_stream
from src.cli.presets import DEFAULT_SEED, Preset, finalize, preset_data
from src.simulation.types import ScenarioConfig
from src.utils.errors import ParseError
from src.utils.logger import get_logger

logger = get_logger(__name__)

PARAM_NAMES = ('beta', 'epsilon', 'q', 'delta', 'kappa', 'p', 'alpha', 'eta', 'zeta')
TRUE_VALUES = ('true', '1', 'yes', 'on')
FALSE_VALUES = ('false', '0', 'no', 'off')


def _to_bool(raw: str) -> bool:
    value = raw.strip().lower()
    if value in TRUE_VALUES:
        return True
    if value in FALSE_VALUES:
        return False
    raise ValueError(f"ожидалось true/false, получено '{raw}'")


def _to_int(raw: str) -> int:
    return int(raw.strip())


def _vector(size: int) -> Callable[[str], List[float]]:
    """Список через запятую; одно число растягивается на все компоненты"""
    def convert(raw: str) -> List[float]:
        values = [float(part) for part in raw.split(',')]
        if len(values) == 1:
            values = values * size
        if len(values) != size:
            raise ValueError(f"ожидалось {size} чисел, получено {len(values)}")
        return values
    return convert


def _diagonal(raw: str) -> List[List[float]]:
    diag = _vector(5)(raw)
    return [[diag[i] if i == j else 0.0 for j in range(5)] for i in range(5)]


def _state(raw: str) -> Dict[str, float]:
    values = [float(part) for part in raw.split(',')]
    if len(values) != 5:
        raise ValueError(f"ожидалось 5 чисел (S,E,I,A,R), получено {len(values)}")
    return dict(zip('seiar', values))


# ключ файла -> (путь в данных сценария, преобразователь)
SCHEMA: Dict[str, Tuple[Tuple[str, ...], Callable[[str], Any]]] = {
    'horizon': (('horizon',), float),
    'dt': (('dt',), float),
    'record_stride': (('record_stride',), _to_int),
    'n0': (('n0',), float),
    'z0': (('z0',), _state),
    'z_hat0': (('z_hat0',), _state),
    'filter.mode': (('filter_mode',), str.strip),
    'filter.sigma': (('sigma',), float),
    'filter.kernel_literal': (('kernel_literal',), _to_bool),
    'filter.p0': (('P0',), _diagonal),
    'filter.perturbation': (('filter_perturbation',), float),
    'noise.enabled': (('noise', 'enabled'), _to_bool),
    'noise.q_diag': (('noise', 'q_diag'), _vector(5)),
    'noise.r_diag': (('noise', 'r_diag'), _vector(2)),
    'noise.shot_count': (('noise', 'shot_count'), _to_int),
    'noise.shot_magnitude': (('noise', 'shot_magnitude'), float),
    'noise.continuous_scaling': (('noise', 'continuous_scaling'), _to_bool),
    'clf.law': (('clf', 'law'), str.strip),
    'clf.lambda': (('clf', 'lambda'), float),
    'clf.k_r': (('clf', 'k_r'), float),
    'clf.c': (('clf', 'c'), float),
    'clf.u_min': (('clf', 'u_min'), _vector(2)),
    'clf.u_max': (('clf', 'u_max'), _vector(2)),
    'clf.z_floor': (('clf', 'z_floor'), float),
    'traj.law': (('traj', 'law'), str.strip),
    'traj.gamma': (('traj', 'gamma'), float),
    'traj.z0': (('traj', 'z0'), _vector(2)),
}
SCHEMA.update({f'plant.{name}': (('plant_params', name), float) for name in PARAM_NAMES})
SCHEMA.update({f'filter.{name}': (('filter_overrides', name), float) for name in PARAM_NAMES})

HEADER_KEYS = ('preset', 'seed')


def _read_bindings(path: str) -> Dict[str, Tuple[str, int]]:
    """Разбирает файл в {ключ: (значение, номер строки)}"""
    try:
        with open(path, 'r', encoding='utf-8') as stream:
            bindings = list(parse_stream(stream))
    except OSError as e:
        raise ParseError(f"не удалось прочитать сценарий {path}: {e}") from e

    entries: Dict[str, Tuple[str, int]] = {}
    for binding in bindings:
        line = binding.original.line

        if binding.error:
            raise ParseError("нераспознанная строка", line=line)
        if binding.key is None:
            continue
        if binding.value is None:
            raise ParseError("ключ без значения", line=line, key=binding.key)
        if binding.key not in SCHEMA and binding.key not in HEADER_KEYS:
            raise ParseError("неизвестный ключ", line=line, key=binding.key)
        if binding.key in entries:
            raise ParseError(f"ключ повторяется (впервые в строке {entries[binding.key][1]})", line=line, key=binding.key)

        entries[binding.key] = (binding.value, line)

    return entries


def load_config(path: str, seed: Optional[int] = None, beta: Optional[float] = None) -> ScenarioConfig:
    """
    Загружает сценарий из файла в синтаксисе .env

    Основа берется из пресета (ключ preset, по умолчанию nominal), остальные
    ключи ее переопределяют. plant.beta обязателен. Аргументы seed и beta
    (из командной строки) имеют приоритет над файлом.

    Raises:
        ParseError: Синтаксическая ошибка, неизвестный ключ или неверное значение
        ValidationError: Нарушен инвариант сценария или не задана beta
    """
    entries = _read_bindings(path)

    preset_name, _ = entries.pop('preset', (Preset.NOMINAL.value, None))
    file_seed = DEFAULT_SEED
    if 'seed' in entries:
        raw, line = entries.pop('seed')
        try:
            file_seed = _to_int(raw)
        except ValueError as e:
            raise ParseError(str(e), line=line, key='seed')
    seed = file_seed if seed is None else seed

    data = preset_data(preset_name.strip(), seed)

    for key, (raw, line) in entries.items():
        path_parts, convert = SCHEMA[key]
        try:
            value = convert(raw)
        except ValueError as e:
            raise ParseError(f"неверное значение '{raw}': {e}", line=line, key=key)

        target = data
        for part in path_parts[:-1]:
            target = target.setdefault(part, {})
        target[path_parts[-1]] = value

    data['noise']['horizon'] = data['horizon']
    if beta is not None:
        data['plant_params']['beta'] = beta

    logger.debug(f"Сценарий {path}: пресет {preset_name}, seed {seed}, ключей {len(entries)}")
    return finalize(data)
