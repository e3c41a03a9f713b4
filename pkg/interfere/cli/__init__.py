#!/usr/bin/env python3
import click

from .. import __version__
from .diagnose_commands import diagnose_dependency, stein_bound
from .estimate_commands import estimate
from .graph_commands import gen_graph, summary
from .sim_commands import sim_coverage, sim_normality, sim_variance
from .utils import setup_logging


@click.group()
@click.option('--config-file', help='Path to configuration file (default: ./interfere.yaml or ~/.interfere/config.yaml)')
@click.option('--profile', default='default', help='Configuration profile to use')
@click.option('--max-workers', type=int, help='Worker threads for replicate loops')
@click.option('-v', '--verbose', is_flag=True, help='Debug logging on stderr')
@click.version_option(version=__version__, prog_name='interfere')
@click.pass_context
def cli(ctx, config_file, profile, max_workers, verbose):
    """interfere - randomized experiments under network interference"""
    ctx.ensure_object(dict)
    ctx.obj['config_file'] = config_file
    ctx.obj['profile'] = profile
    ctx.obj['max_workers'] = max_workers
    setup_logging(verbose)


cli.add_command(summary)
cli.add_command(gen_graph)
cli.add_command(sim_normality)
cli.add_command(sim_variance)
cli.add_command(sim_coverage)
cli.add_command(diagnose_dependency)
cli.add_command(stein_bound)
cli.add_command(estimate)
