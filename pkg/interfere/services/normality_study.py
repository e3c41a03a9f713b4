import logging
from typing import Any, Dict, List

import numpy as np

from ..core.config import ExperimentConfig
from ..core.estimators import simulate_diff_in_means
from ..core.exceptions import InterfereError
from ..core.executor import ReplicateExecutor
from ..core.normality import empirical_moments, ks_uniformity, shapiro_wilk, wasserstein_to_gaussian
from ..core.progress import ProgressBar
from ..core.reporter import StudyReporter
from .common import cell_model, instance_design, load_graph, shells_by_rho

logger = logging.getLogger(__name__)

TABLE_COLUMNS = ['school', 'nodes', 'rho_max', 'gamma', 'sw_statistic_avg', 'p_avg', 'p_min', 'p_max']


class NormalityStudyService:
    """Shapiro-Wilk normality of tau_hat across direct-effect instances"""

    def __init__(self):
        self.study_name = 'normality'
        self.columns = TABLE_COLUMNS

    def run(self, config: ExperimentConfig, progress: bool = False) -> StudyReporter:
        label = config.graphs[0].label if len(config.graphs) == 1 else 'multi'
        reporter = StudyReporter(self.study_name, label, config.seed, self.columns)
        reporter.metadata['config'] = config.to_dict()
        reporter.metadata['ks_uniformity'] = []
        executor = ReplicateExecutor(config.max_workers)

        total = len(config.graphs) * len(config.cells)
        bar = ProgressBar(total, "Normality cells") if progress else None

        for spec in config.graphs:
            try:
                graph = load_graph(spec, config)
            except InterfereError as e:
                for rho, gamma in config.cells:
                    reporter.add_error({'school': spec.label, 'rho_max': rho, 'gamma': gamma}, str(e))
                if bar:
                    bar.finish_cell(failed=True, count=len(config.cells))
                continue

            for rho, shells, shell_error in shells_by_rho(graph, config.rho_max_list):
                for gamma in config.gamma_list:
                    keys = {'school': spec.label, 'nodes': graph.n, 'rho_max': rho, 'gamma': gamma}
                    if bar:
                        bar.start_cell(f"{spec.label} rho_max={rho} gamma={gamma}")
                    failed = bool(shell_error)
                    if shell_error:
                        reporter.add_error(keys, shell_error)
                    else:
                        try:
                            self.run_cell(reporter, keys, graph, shells, config, gamma, executor)
                        except InterfereError as e:
                            logger.error("Cell %s/rho_max=%d/gamma=%s failed: %s", spec.label, rho, gamma, e)
                            reporter.add_error(keys, str(e))
                            failed = True
                    if bar:
                        bar.finish_cell(failed)
        return reporter

    def run_cell(self, reporter: StudyReporter, keys: Dict[str, Any], graph, shells, config: ExperimentConfig,
                 gamma: float, executor: ReplicateExecutor) -> None:
        statistics: List[float] = []
        p_values: List[float] = []
        instance_rows = []
        redraws_left = config.redraw_budget
        for instance in range(config.instances):
            model = cell_model(graph, shells, config, gamma, instance)
            tau_hats, redraws = simulate_diff_in_means(model, instance_design(config, instance), config.replicates,
                                                       redraws_left, executor)
            redraws_left -= redraws
            if redraws:
                logger.warning("%s instance %d: %d degenerate assignment(s) redrawn", keys, instance, redraws)
            result = shapiro_wilk(tau_hats)
            statistics.append(result.statistic)
            p_values.append(result.p_value)
            instance_rows.append({
                'network': keys['school'],
                'rho_max': keys['rho_max'],
                'gamma': gamma,
                'instance': instance,
                'sw_statistic': round(result.statistic, 6),
                'p_value': round(result.p_value, 6),
                **self.shape_columns(tau_hats),
            })

        reporter.add_row({
            **keys,
            'sw_statistic_avg': round(float(np.mean(statistics)), 4),
            'p_avg': round(float(np.mean(p_values)), 4),
            'p_min': round(float(np.min(p_values)), 4),
            'p_max': round(float(np.max(p_values)), 4),
        })
        reporter.add_table('pvalues', instance_rows)
        reporter.metadata['ks_uniformity'].append({
            'network': keys['school'], 'rho_max': keys['rho_max'], 'gamma': gamma,
            'ks_p_value': ks_uniformity(p_values),
        })

    @staticmethod
    def shape_columns(tau_hats: np.ndarray) -> Dict[str, Any]:
        """Skewness, excess kurtosis and W1 distance to the Gaussian of one instance's tau_hat draws"""
        moments = empirical_moments(tau_hats)
        if moments.variance == 0:
            return {'skewness': '', 'excess_kurtosis': '', 'w1_gaussian': ''}
        return {
            'skewness': round(moments.skewness, 6),
            'excess_kurtosis': round(moments.kurtosis, 6),
            'w1_gaussian': round(wasserstein_to_gaussian(tau_hats), 6),
        }
