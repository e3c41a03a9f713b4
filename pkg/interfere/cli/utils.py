import functools
import json
import logging
import sys
from typing import Any, Dict, List, Optional

import click

from ..core.config import ConfigManager
from ..core.exceptions import InterfereError
from ..core.graph import GENERATOR_KINDS, Graph, gen_random_graph, read_edge_list
from ..core.storage import StorageManager

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(levelname)s %(name)s: %(message)s'


def setup_logging(verbose: bool) -> None:
    logging.basicConfig(level=logging.DEBUG if verbose else logging.WARNING, format=LOG_FORMAT, stream=sys.stderr)


def status(message: str) -> None:
    """Status line on stderr so stdout stays machine-readable"""
    click.echo(message, err=True)


def handle_errors(f):
    """Turn library errors into a one-line message and exit status 1"""
    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except InterfereError as e:
            status(f"❌ {e}")
            sys.exit(1)
    return wrapper


def parse_list(value: Optional[str], cast) -> Optional[List[Any]]:
    """'0.1,0.5' -> [0.1, 0.5]; None stays None"""
    if value is None:
        return None
    try:
        return [cast(part.strip()) for part in value.split(',') if part.strip()]
    except ValueError:
        raise click.BadParameter(f"expected a comma-separated list, got {value!r}")


def graph_options(f):
    """Graph source options shared by every command that needs a graph"""
    f = click.option('--m', 'm', type=int, help='barabasi_albert edges per new node')(f)
    f = click.option('--beta', type=float, help='watts_strogatz rewiring probability')(f)
    f = click.option('--k', 'k', type=int, help='watts_strogatz ring degree (even)')(f)
    f = click.option('--p', 'p', type=float, help='erdos_renyi edge probability')(f)
    f = click.option('--n', 'n', type=int, help='Number of nodes for generated graphs')(f)
    f = click.option('--generator', type=click.Choice(GENERATOR_KINDS), help='Synthetic graph generator')(f)
    f = click.option('--graph', 'graph_path', type=click.Path(), help='Edge-list file (one "u v" pair per line)')(f)
    return f


def sim_options(f):
    """Options shared by the simulation commands"""
    f = click.option('--progress/--no-progress', default=False, help='Show a progress bar on stderr')(f)
    f = click.option('--out-dir', help='Directory for result files')(f)
    f = click.option('--redraw-budget', type=int, help='Degenerate-assignment redraws allowed per grid cell')(f)
    f = click.option('--direct-effect', type=click.Choice(['independent', 'constant']),
                     help='Direct-effect model for alpha')(f)
    f = click.option('--alpha-mean-control', type=float, help='Mean of exponential alpha^(0)')(f)
    f = click.option('--alpha-mean-treated', type=float, help='Mean of exponential alpha^(1)')(f)
    f = click.option('--replicates', type=int, help='Treatment draws per instance')(f)
    f = click.option('--instances', type=int, help='Direct-effect redraws')(f)
    f = click.option('--rho-max', 'rho_max_list', help='Comma-separated rho_max values')(f)
    f = click.option('--gamma', 'gamma_list', help='Comma-separated decay rates')(f)
    f = click.option('--pi', type=float, help='Treatment probability')(f)
    f = click.option('--graph-seed', type=int, help='Seed for graph generation (default: --seed)')(f)
    f = click.option('--seed', type=int, required=True, help='Master seed (required)')(f)
    f = graph_options(f)
    return f


def get_profile_from_context(ctx, profile_arg: Optional[str] = None) -> str:
    return profile_arg or ctx.obj.get('profile', 'default')


def load_config_manager(ctx) -> ConfigManager:
    return ConfigManager(config_file=ctx.obj.get('config_file'), profile=get_profile_from_context(ctx))


def load_graph(graph_path: Optional[str], generator: Optional[str], n: Optional[int], seed: int,
               p=None, k=None, beta=None, m=None) -> Graph:
    """Graph from ``--graph`` or, failing that, from the generator options"""
    if graph_path:
        result = read_edge_list(graph_path)
        if result.duplicates_dropped or result.self_loops_dropped:
            status(f"⚠️  {graph_path}: dropped {result.duplicates_dropped} duplicate edge(s) and "
                   f"{result.self_loops_dropped} self-loop(s)")
        return result.graph
    if not generator:
        raise click.UsageError('either --graph or --generator is required')
    return gen_random_graph(generator, n, seed, p=p, k=k, beta=beta, m=m)


def execute_study(ctx, service_class, study: str, cli_args: Dict[str, Any], progress: bool) -> None:
    """Build the study config, run the service and save its outputs"""
    config_manager = load_config_manager(ctx)
    if ctx.obj.get('max_workers') is not None and cli_args.get('max_workers') is None:
        cli_args['max_workers'] = ctx.obj['max_workers']
    config = config_manager.experiment_config(study, cli_args)

    storage = StorageManager(config.out_dir)
    if not storage.validate_save_location():
        raise click.ClickException(f"output directory '{config.out_dir}' is not writable")

    status(f"🔍 Running {study} study: {len(config.cells)} cell(s), {config.replicates} replicates, seed {config.seed}")
    service = service_class()
    reporter = service.run(config, progress=progress)

    click.echo(reporter.generate_summary_report())
    for path in reporter.save(storage):
        status(f"📄 Saved: {path}")
    if reporter.failed:
        status(f"⚠️  {reporter.failed} cell(s) failed; see the error column")
    else:
        status("✅ Done")


def echo_json(data: Dict[str, Any]) -> None:
    click.echo(json.dumps(data, indent=2, sort_keys=True, default=float))
