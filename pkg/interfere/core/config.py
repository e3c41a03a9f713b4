"""Configuration management for interfere studies"""

import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import yaml

from .exceptions import ConfigNotFoundError, ConfigValidationError
from .graph import GENERATOR_KINDS, Graph, gen_random_graph, read_edge_list
from .outcomes import DEFAULT_MEAN_CONTROL, DEFAULT_MEAN_TREATED, DIRECT_EFFECT_KINDS

logger = logging.getLogger(__name__)

STUDIES = ['normality', 'variance', 'coverage']

CONFIG_FILENAMES = ['interfere.yaml', 'interfere.yml', '.interfere.yaml', '.interfere.yml']

# Shared defaults
DEFAULT_CONFIG = {
    'graph': None,
    'graphs': None,
    'generator': 'watts_strogatz',
    'label': None,
    'n': 1000,
    'p': 0.01,
    'k': 10,
    'beta': 0.1,
    'm': 3,
    'pi': 0.5,
    'alpha_mean_treated': DEFAULT_MEAN_TREATED,
    'alpha_mean_control': DEFAULT_MEAN_CONTROL,
    'direct_effect': 'independent',
    'level': 0.95,
    'seed': None,
    'graph_seed': None,
    'out_dir': '.',
    'max_workers': 4,
    'redraw_budget': 100,
    'exact_distances': False,
    'sample_size': 64,
    'model': None,
}

STUDY_DEFAULTS = {
    'normality': {
        'gamma_list': [0.5, 0.9, 0.99],
        'rho_max_list': [2, 6],
        'instances': 10,
        'replicates': 500,
    },
    'variance': {
        'gamma_list': [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9],
        'rho_max_list': [0, 1, 2, 3, 4, 5],
        'instances': 1,
        'replicates': 5000,
    },
    'coverage': {
        'gamma_list': [0.5, 0.9],
        'rho_max_list': [0, 2, 5],
        'instances': 1,
        'replicates': 2000,
    },
}


@dataclass(frozen=True)
class GraphSpec:
    """Where a study graph comes from: an edge-list file or a generator"""
    label: str
    path: Optional[str] = None
    generator: Optional[str] = None
    n: int = 1000
    p: Optional[float] = None
    k: Optional[int] = None
    beta: Optional[float] = None
    m: Optional[int] = None

    def load(self, seed: int) -> Graph:
        if self.path:
            return read_edge_list(self.path).graph
        return gen_random_graph(self.generator, self.n, seed, p=self.p, k=self.k, beta=self.beta, m=self.m)

    def to_dict(self) -> Dict[str, Any]:
        if self.path:
            return {'label': self.label, 'graph': self.path}
        return {'label': self.label, 'generator': self.generator, 'n': self.n, 'p': self.p, 'k': self.k,
                'beta': self.beta, 'm': self.m}


@dataclass(frozen=True)
class ExperimentConfig:
    study: str
    graphs: Tuple[GraphSpec, ...]
    pi: float
    gamma_list: Tuple[float, ...]
    rho_max_list: Tuple[int, ...]
    instances: int
    replicates: int
    alpha_mean_treated: float
    alpha_mean_control: float
    seed: int
    graph_seed: int
    direct_effect: str = 'independent'
    level: float = 0.95
    out_dir: str = '.'
    max_workers: int = 4
    redraw_budget: int = 100
    model: Optional[Dict[str, Any]] = field(default=None)

    @property
    def cells(self) -> List[Tuple[int, float]]:
        """Grid cells in output order: rho_max outer, gamma inner"""
        return [(rho, gamma) for rho in self.rho_max_list for gamma in self.gamma_list]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'study': self.study,
            'graphs': [g.to_dict() for g in self.graphs],
            'pi': self.pi,
            'gamma_list': list(self.gamma_list),
            'rho_max_list': list(self.rho_max_list),
            'instances': self.instances,
            'replicates': self.replicates,
            'alpha_mean_treated': self.alpha_mean_treated,
            'alpha_mean_control': self.alpha_mean_control,
            'direct_effect': self.direct_effect,
            'level': self.level,
            'seed': self.seed,
            'graph_seed': self.graph_seed,
            'redraw_budget': self.redraw_budget,
            'model': self.model,
        }


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _graph_label(entry: Dict[str, Any], index: int) -> str:
    if entry.get('label'):
        return str(entry['label'])
    if entry.get('graph'):
        return Path(entry['graph']).stem
    return f"{entry.get('generator', 'graph')}_{index}" if index else str(entry.get('generator', 'graph'))


def validate_settings(settings: Dict[str, Any], study: Optional[str] = None) -> List[str]:
    """Every problem in ``settings``, as readable messages"""
    errors = []

    for key in ('pi', 'level'):
        value = settings.get(key)
        if not _is_number(value) or not 0 < value < 1:
            errors.append(f"'{key}' must lie in (0, 1), got {value!r}")

    for key in ('alpha_mean_treated', 'alpha_mean_control'):
        value = settings.get(key)
        if not _is_number(value) or value <= 0:
            errors.append(f"'{key}' must be positive, got {value!r}")

    if settings.get('direct_effect') not in DIRECT_EFFECT_KINDS:
        errors.append(f"'direct_effect' must be one of {', '.join(DIRECT_EFFECT_KINDS)}")

    for key in ('max_workers', 'sample_size'):
        value = settings.get(key)
        if not _is_int(value) or value <= 0:
            errors.append(f"'{key}' must be positive integer")

    if not _is_int(settings.get('redraw_budget')) or settings['redraw_budget'] < 0:
        errors.append("'redraw_budget' must be a non-negative integer")

    for key in ('seed', 'graph_seed'):
        value = settings.get(key)
        if value is not None and (not _is_int(value) or value < 0):
            errors.append(f"'{key}' must be a non-negative integer")

    for entry in _graph_entries(settings):
        if entry.get('graph'):
            continue
        if entry.get('generator') not in GENERATOR_KINDS:
            errors.append(f"Unknown generator: {entry.get('generator')!r}")
        if not _is_int(entry.get('n')) or entry['n'] < 1:
            errors.append(f"'n' must be positive integer, got {entry.get('n')!r}")

    if study is not None:
        if study not in STUDIES:
            errors.append(f"Unknown study: {study}")
        gammas = settings.get('gamma_list')
        if not isinstance(gammas, (list, tuple)) or not gammas:
            errors.append("'gamma_list' must be a non-empty list")
        else:
            for gamma in gammas:
                if not _is_number(gamma) or not 0 < gamma < 1:
                    errors.append(f"Invalid gamma: {gamma!r} (must lie in (0, 1))")
        rhos = settings.get('rho_max_list')
        if not isinstance(rhos, (list, tuple)) or not rhos:
            errors.append("'rho_max_list' must be a non-empty list")
        else:
            for rho in rhos:
                if not _is_int(rho) or rho < 0:
                    errors.append(f"Invalid rho_max: {rho!r} (must be a non-negative integer)")
        if not _is_int(settings.get('instances')) or settings['instances'] < 1:
            errors.append("'instances' must be positive integer")
        if not _is_int(settings.get('replicates')) or settings['replicates'] < 2:
            errors.append("'replicates' must be an integer >= 2")

    model = settings.get('model')
    if model is not None:
        if not isinstance(model, dict):
            errors.append("'model' must be a mapping")
        else:
            errors.extend(_model_errors(model))

    return errors


def _model_errors(model: Dict[str, Any]) -> List[str]:
    errors = [f"'model' section is missing '{key}'" for key in ('gamma', 'rho_max', 'seed') if key not in model]
    if 'gamma' in model and (not _is_number(model['gamma']) or not 0 < model['gamma'] < 1):
        errors.append(f"'model.gamma' must lie in (0, 1), got {model['gamma']!r}")
    if 'rho_max' in model and (not _is_int(model['rho_max']) or model['rho_max'] < 0):
        errors.append(f"'model.rho_max' must be a non-negative integer, got {model['rho_max']!r}")
    if 'seed' in model and (not _is_int(model['seed']) or model['seed'] < 0):
        errors.append("'model.seed' must be a non-negative integer")
    means = model.get('alpha_means')
    if means is not None and (not isinstance(means, (list, tuple)) or len(means) != 2
                              or not all(_is_number(v) and v > 0 for v in means)):
        errors.append("'model.alpha_means' must be a pair of positive numbers [treated, control]")
    if model.get('direct_effect', 'independent') not in DIRECT_EFFECT_KINDS:
        errors.append(f"'model.direct_effect' must be one of {', '.join(DIRECT_EFFECT_KINDS)}")
    return errors


def _apply_model_section(settings: Dict[str, Any], cli_args: Dict[str, Any]) -> None:
    """A ``model:`` section pins the grid to its cell and supplies the direct effects.

    Explicit command-line values still win.
    """
    model = settings.get('model')
    if not model:
        return
    pinned = {
        'gamma_list': [model['gamma']],
        'rho_max_list': [model['rho_max']],
        'direct_effect': model.get('direct_effect', 'independent'),
    }
    if model.get('alpha_means') is not None:
        pinned['alpha_mean_treated'], pinned['alpha_mean_control'] = model['alpha_means']
    for key, value in pinned.items():
        if cli_args.get(key) is None:
            settings[key] = value


def _graph_entries(settings: Dict[str, Any]) -> List[Dict[str, Any]]:
    graphs = settings.get('graphs')
    if graphs:
        shared = {key: settings.get(key) for key in ('generator', 'n', 'p', 'k', 'beta', 'm')}
        return [{**shared, **entry} for entry in graphs]
    return [{key: settings.get(key) for key in ('graph', 'label', 'generator', 'n', 'p', 'k', 'beta', 'm')}]


class ConfigManager:
    """Manage configuration with YAML profiles"""

    def __init__(self, config_file: Optional[str] = None, profile: str = "default"):
        self.config_file = config_file
        self.profile = profile
        self.config: Dict[str, Any] = {}
        self.raw_config: Dict[str, Any] = {}
        self.config_path: Optional[str] = None

        self._load_config()
        self._validate_config()

    def _find_config_file(self) -> Optional[str]:
        """Find config: --config-file > ./interfere.yaml > ~/.interfere/config.yaml"""
        if self.config_file:
            if os.path.exists(self.config_file):
                return self.config_file
            raise ConfigNotFoundError(f"Config file not found: {self.config_file}")

        for filename in CONFIG_FILENAMES:
            if os.path.exists(filename):
                return filename

        home_config = Path.home() / '.interfere' / 'config.yaml'
        if home_config.exists():
            return str(home_config)

        return None

    def _load_config(self) -> None:
        self.config_path = self._find_config_file()
        self.config = DEFAULT_CONFIG.copy()

        if not self.config_path:
            self.raw_config = {'default': {}}
            return

        try:
            with open(self.config_path, 'r') as f:
                self.raw_config = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise ConfigValidationError(f"Invalid YAML syntax in {self.config_path}: {e}")
        except OSError as e:
            raise ConfigValidationError(f"Failed to load config file {self.config_path}: {e}")

        if not isinstance(self.raw_config, dict):
            raise ConfigValidationError(f"{self.config_path}: top level must be a mapping")

        self.config.update(self.raw_config.get('default') or {})

        if self.profile != 'default':
            profiles = self.raw_config.get('profiles') or {}
            if self.profile in profiles:
                self.config.update(profiles[self.profile] or {})
            else:
                logger.warning("Profile '%s' not found, using 'default'", self.profile)

    def _validate_config(self) -> None:
        errors = validate_settings(self.config)
        if errors:
            raise ConfigValidationError('\n'.join(errors))

    def get(self, key: str, default: Any = None) -> Any:
        return self.config.get(key, default)

    def get_all_profiles(self) -> List[str]:
        profiles = ['default']
        if 'profiles' in self.raw_config:
            profiles.extend(self.raw_config['profiles'].keys())
        return profiles

    def study_settings(self, study: str) -> Dict[str, Any]:
        """Shared defaults < study defaults < file default section < profile.

        Within each section, a nested ``<study>:`` mapping overrides the flat keys.
        """
        if study not in STUDY_DEFAULTS:
            raise ConfigValidationError(f"Unknown study: {study}")
        settings = DEFAULT_CONFIG.copy()
        settings.update(STUDY_DEFAULTS[study])
        for section in (self.raw_config.get('default') or {}, self._profile_section()):
            settings.update({k: v for k, v in section.items() if k not in STUDIES})
            settings.update(section.get(study) or {})
        return settings

    def _profile_section(self) -> Dict[str, Any]:
        if self.profile == 'default':
            return {}
        return (self.raw_config.get('profiles') or {}).get(self.profile) or {}

    def merge_with_cli_args(self, cli_args: Dict[str, Any], study: Optional[str] = None) -> Dict[str, Any]:
        """Merge config with CLI args (CLI takes priority)"""
        merged = self.study_settings(study) if study else self.config.copy()
        for key, value in cli_args.items():
            if value is not None:
                merged[key] = value
        return merged

    def experiment_config(self, study: str, cli_args: Dict[str, Any]) -> ExperimentConfig:
        settings = self.merge_with_cli_args(cli_args, study)
        errors = validate_settings(settings, study)
        if not errors:
            _apply_model_section(settings, cli_args)
        if settings.get('seed') is None:
            errors.append("'seed' is required for simulation studies")
        if errors:
            raise ConfigValidationError('\n'.join(errors))

        graphs = tuple(
            GraphSpec(label=_graph_label(entry, index), path=entry.get('graph'), generator=entry.get('generator'),
                      n=entry.get('n'), p=entry.get('p'), k=entry.get('k'), beta=entry.get('beta'),
                      m=entry.get('m'))
            for index, entry in enumerate(_graph_entries(settings))
        )
        seed = settings['seed']
        return ExperimentConfig(
            study=study,
            graphs=graphs,
            pi=float(settings['pi']),
            gamma_list=tuple(float(g) for g in settings['gamma_list']),
            rho_max_list=tuple(int(r) for r in settings['rho_max_list']),
            instances=int(settings['instances']),
            replicates=int(settings['replicates']),
            alpha_mean_treated=float(settings['alpha_mean_treated']),
            alpha_mean_control=float(settings['alpha_mean_control']),
            seed=seed,
            graph_seed=seed if settings.get('graph_seed') is None else settings['graph_seed'],
            direct_effect=settings['direct_effect'],
            level=float(settings['level']),
            out_dir=str(settings['out_dir']),
            max_workers=int(settings['max_workers']),
            redraw_budget=int(settings['redraw_budget']),
            model=settings.get('model'),
        )
