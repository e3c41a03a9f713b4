import logging

from ..core.config import ExperimentConfig
from ..core.exceptions import InterfereError
from ..core.executor import ReplicateExecutor
from ..core.progress import ProgressBar
from ..core.reporter import StudyReporter
from ..core.variance import TABLE_COLUMNS, variance_components_mc
from .common import cell_model, instance_design, primary_graph, shells_by_rho

logger = logging.getLogger(__name__)


class VarianceStudyService:
    """SUTVA, expected and observed variances of tau_hat over the (rho_max, gamma) grid"""

    def __init__(self):
        self.study_name = 'variance'
        self.columns = TABLE_COLUMNS

    def run(self, config: ExperimentConfig, progress: bool = False) -> StudyReporter:
        spec, graph = primary_graph(config)
        reporter = StudyReporter(self.study_name, spec.label, config.seed, self.columns)
        reporter.metadata['config'] = config.to_dict()
        reporter.metadata['components'] = []
        executor = ReplicateExecutor(config.max_workers)
        design = instance_design(config)
        bar = ProgressBar(len(config.cells), "Variance cells") if progress else None

        for rho, shells, shell_error in shells_by_rho(graph, config.rho_max_list):
            for gamma in config.gamma_list:
                keys = {'rho_max': rho, 'gamma': gamma}
                if bar:
                    bar.start_cell(f"rho_max={rho} gamma={gamma}")
                failed = bool(shell_error)
                if shell_error:
                    reporter.add_error(keys, shell_error)
                else:
                    try:
                        model = cell_model(graph, shells, config, gamma)
                        components = variance_components_mc(model, design.pi, config.replicates, design.seed,
                                                            config.redraw_budget, executor)
                        reporter.add_row(components.as_row(rho, gamma))
                        reporter.metadata['components'].append({
                            **keys,
                            'sigma1_sq': components.sigma1_sq,
                            'sigma0_sq': components.sigma0_sq,
                            'sigma01': components.sigma01,
                            'sigma_tau_sq': components.sigma_tau_sq,
                            'observed_var_dm_se': components.observed_var_dm_se,
                            'observed_var_ht': components.observed_var_ht,
                            'redraws': components.redraws,
                            'model': model.to_config(),
                        })
                    except InterfereError as e:
                        logger.error("Cell rho_max=%d/gamma=%s failed: %s", rho, gamma, e)
                        reporter.add_error(keys, str(e))
                        failed = True
                if bar:
                    bar.finish_cell(failed)
        return reporter
