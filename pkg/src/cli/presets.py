# src/cli/presets.py

from enum import Enum
from typing import Any, Dict, Optional
import numpy as np
from src.config.manager import config_manager
from src.config.validation import build_model
from src.model.params import FLU_PARAMS, ModelParams, calibrate_beta
from src.simulation.types import ScenarioConfig
from src.utils.errors import ValidationError

POPULATION = 16000.0
HORIZON = 40.0
DT = 0.01
DEFAULT_SEED = 42

Z0 = (15000.0, 200.0, 500.0, 300.0, 0.0)
Z_HAT0 = (11000.0, 800.0, 1000.0, 700.0, 2500.0)

NOMINAL_SETTINGS = {
    'p0_scale': 1.0,
    'r': 0.01,
    'q': 1.0,
    'sigma': 0.01,
    'lambda': 1.0,
    'k_r': 2.0,
    'c': 10.0,
    'u_max': 1.0,
    'u_min': 0.0,
}

SHOT_COUNT = 20
SHOT_MAGNITUDE = 200.0
PERTURBATION = 0.5


class Preset(str, Enum):
    NOMINAL = 'nominal'
    PERTURB_PLUS50 = 'perturb_plus50'
    PERTURB_MINUS50 = 'perturb_minus50'
    EKF_BASELINE = 'ekf_baseline'
    NOISE_FREE = 'noise_free'


def parse_preset(name: str) -> Preset:
    try:
        return Preset(name)
    except ValueError:
        known = ', '.join(p.value for p in Preset)
        raise ValidationError(f"неизвестный пресет '{name}' (доступны: {known})")


def _diag(value: float) -> list:
    return (value * np.eye(5)).tolist()


def preset_data(name: str, seed: int = DEFAULT_SEED, beta: Optional[float] = None) -> Dict[str, Any]:
    """
    Исходные данные сценария пресета в виде словаря (до валидации)

    plant_params.beta остается None, если beta не передана; filter_params
    описываются относительным отклонением 'filter_perturbation'.
    """
    preset = parse_preset(name)

    plant = dict(FLU_PARAMS, beta=beta)
    q_diag = [NOMINAL_SETTINGS['q']] * 5
    z_hat0 = list(Z_HAT0)
    p0 = _diag(NOMINAL_SETTINGS['p0_scale'])
    noise_enabled = True
    perturbation = 0.0
    filter_mode = 'emckf'

    if preset == Preset.PERTURB_PLUS50:
        perturbation = PERTURBATION
    elif preset == Preset.PERTURB_MINUS50:
        perturbation = -PERTURBATION
    elif preset == Preset.EKF_BASELINE:
        filter_mode = 'ekf'
    elif preset == Preset.NOISE_FREE:
        noise_enabled = False
        q_diag = [0.0] * 5
        z_hat0 = list(Z0)
        p0 = _diag(0.0)

    return {
        'horizon': HORIZON,
        'dt': DT,
        'plant_params': plant,
        'filter_perturbation': perturbation,
        'z0': dict(zip('seiar', Z0)),
        'z_hat0': dict(zip('seiar', z_hat0)),
        'P0': p0,
        'noise': {
            'q_diag': q_diag,
            'r_diag': [NOMINAL_SETTINGS['r']] * 2,
            'shot_count': SHOT_COUNT,
            'shot_magnitude': SHOT_MAGNITUDE,
            'seed': seed,
            'horizon': HORIZON,
            'enabled': noise_enabled,
        },
        'filter_mode': filter_mode,
        'sigma': NOMINAL_SETTINGS['sigma'],
        'clf': {
            'lambda': NOMINAL_SETTINGS['lambda'],
            'k_r': NOMINAL_SETTINGS['k_r'],
            'c': NOMINAL_SETTINGS['c'],
            'u_min': [NOMINAL_SETTINGS['u_min']] * 2,
            'u_max': [NOMINAL_SETTINGS['u_max']] * 2,
        },
        'traj': {'law': 'exp_decay', 'gamma': 0.3},
        'seed': seed,
        'record_stride': 10,
        'n0': POPULATION,
    }


def finalize(data: Dict[str, Any]) -> ScenarioConfig:
    """
    Превращает словарь сценария в ScenarioConfig

    Параметры фильтра: номинальные параметры объекта, отклоненные на
    filter_perturbation, поверх которых накладываются явные filter_params.
    """
    data = dict(data)
    plant = data['plant_params']

    if plant.get('beta') is None:
        raise ValidationError(
            "plant.beta (β) обязателен: значение не опубликовано, "
            "откалибруйте его через calibrate_beta (R0 = 1.8 при N0 = 16000 дает β ≈ 4.1185e-5)"
        )

    plant_params = build_model(ModelParams, plant, 'plant')
    try:
        filter_params = plant_params.perturbed(data.pop('filter_perturbation', 0.0))
    except ValueError as e:
        raise ValidationError(f"filter.perturbation: {e}")
    overrides = data.pop('filter_overrides', {})
    if overrides:
        filter_params = build_model(ModelParams, {**filter_params.model_dump(), **overrides}, 'filter')

    data['plant_params'] = plant_params
    data['filter_params'] = filter_params
    return build_model(ScenarioConfig, data)


def build_preset(name: str, seed: int = DEFAULT_SEED, beta: Optional[float] = None) -> ScenarioConfig:
    """Сценарий пресета; без beta подставляется откалиброванное значение"""
    if beta is None:
        beta = default_beta()
    return finalize(preset_data(name, seed, beta))


def default_beta() -> float:
    """beta, дающая TARGET_R0 при параметрах гриппа и N0 = 16000"""
    target_r0 = config_manager.get_calibration_config()['target_r0']
    return calibrate_beta(ModelParams.flu(beta=0.0), POPULATION, target_r0)
