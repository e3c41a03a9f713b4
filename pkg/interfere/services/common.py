"""Helpers shared by the study services"""

import logging
from typing import Iterable, Optional, Tuple

from ..core.config import ExperimentConfig, GraphSpec
from ..core.estimators import Design
from ..core.graph import DistanceShells, Graph, distance_shells
from ..core.outcomes import DecayModel, build_decay_model
from ..core.rng import STREAM_ASSIGNMENT, STREAM_DIAGNOSTIC, derive_seed

logger = logging.getLogger(__name__)


def load_graph(spec: GraphSpec, config: ExperimentConfig) -> Graph:
    graph = spec.load(config.graph_seed)
    logger.info("Loaded graph '%s': %d nodes, %d edges", spec.label, graph.n, graph.num_edges)
    return graph


def primary_graph(config: ExperimentConfig) -> Tuple[GraphSpec, Graph]:
    """The first configured graph; single-graph studies ignore the rest"""
    if len(config.graphs) > 1:
        logger.warning("%s study uses only the first graph ('%s')", config.study, config.graphs[0].label)
    spec = config.graphs[0]
    return spec, load_graph(spec, config)


def cell_model(graph: Graph, shells: DistanceShells, config: ExperimentConfig, gamma: float,
               instance: int = 0) -> DecayModel:
    """Decay model for one grid cell; a ``model:`` section supplies the direct-effect seed"""
    if config.model:
        section = {**config.model, 'gamma': gamma, 'rho_max': shells.rho_max,
                   'alpha_means': [config.alpha_mean_treated, config.alpha_mean_control],
                   'direct_effect': config.direct_effect}
        return DecayModel.from_config(graph, section, instance, shells=shells)
    return build_decay_model(graph, shells.rho_max, gamma, seed=config.seed, instance=instance,
                             mean_treated=config.alpha_mean_treated, mean_control=config.alpha_mean_control,
                             direct_effect=config.direct_effect, shells=shells)


def instance_design(config: ExperimentConfig, instance: int = 0) -> Design:
    """Assignment design for one direct-effect instance; shared by every grid cell"""
    return Design(pi=config.pi, seed=derive_seed(config.seed, STREAM_ASSIGNMENT, instance))


def auxiliary_seed(config: ExperimentConfig, purpose: int) -> int:
    return derive_seed(config.seed, STREAM_DIAGNOSTIC, purpose)


def shells_by_rho(graph: Graph, rho_values: Iterable[int]) -> Iterable[Tuple[int, Optional[DistanceShells], Optional[str]]]:
    """Yield ``(rho_max, shells, error)``; a failure is reported rather than raised"""
    for rho in rho_values:
        try:
            yield rho, distance_shells(graph, rho), None
        except (ValueError, MemoryError) as e:
            logger.error("Distance shells for rho_max=%d failed: %s", rho, e)
            yield rho, None, str(e)
