import logging

from ..core.config import ExperimentConfig
from ..core.exceptions import InterfereError
from ..core.executor import ReplicateExecutor
from ..core.outcomes import eate_closed_form
from ..core.progress import ProgressBar
from ..core.reporter import StudyReporter
from ..core.variance import COVERAGE_COLUMNS, interval_coverage, variance_components_mc
from .common import auxiliary_seed, cell_model, instance_design, primary_graph, shells_by_rho

logger = logging.getLogger(__name__)

# Seed purpose for the ground-truth sigma_tau^2 run, kept apart from the coverage draws
SIGMA_TAU_PURPOSE = 1


class CoverageStudyService:
    """Coverage of Neyman, combined and oracle-adjusted confidence intervals"""

    def __init__(self):
        self.study_name = 'coverage'
        self.columns = COVERAGE_COLUMNS

    def run(self, config: ExperimentConfig, progress: bool = False) -> StudyReporter:
        spec, graph = primary_graph(config)
        reporter = StudyReporter(self.study_name, spec.label, config.seed, self.columns)
        reporter.metadata['config'] = config.to_dict()
        executor = ReplicateExecutor(config.max_workers)
        design = instance_design(config)
        bar = ProgressBar(len(config.cells), "Coverage cells") if progress else None

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
                        tau = eate_closed_form(model, design.pi).value
                        components = variance_components_mc(model, design.pi, config.replicates,
                                                            auxiliary_seed(config, SIGMA_TAU_PURPOSE),
                                                            config.redraw_budget, executor)
                        result = interval_coverage(model, design.pi, tau, config.replicates, design.seed,
                                                   level=config.level, sigma_tau_sq=components.sigma_tau_sq,
                                                   redraw_budget=config.redraw_budget - components.redraws,
                                                   executor=executor)
                        reporter.add_row(result.as_row(rho, gamma))
                    except InterfereError as e:
                        logger.error("Cell rho_max=%d/gamma=%s failed: %s", rho, gamma, e)
                        reporter.add_error(keys, str(e))
                        failed = True
                if bar:
                    bar.finish_cell(failed)
        return reporter
