import csv
from io import StringIO
from pathlib import Path

import click

from ..core.graph import GENERATOR_KINDS, SUMMARY_COLUMNS, graph_summary, write_edge_list
from .utils import graph_options, handle_errors, load_config_manager, load_graph, status


@click.command('summary')
@click.option('--graph', 'graph_paths', multiple=True, type=click.Path(), help='Edge-list file; repeat for several networks')
@click.option('--generator', type=click.Choice(GENERATOR_KINDS),
              help='Synthetic graph generator (used when no --graph is given)')
@click.option('--n', 'n', type=int, default=1000, help='Number of nodes for generated graphs')
@click.option('--p', 'p', type=float, help='erdos_renyi edge probability')
@click.option('--k', 'k', type=int, help='watts_strogatz ring degree (even)')
@click.option('--beta', type=float, help='watts_strogatz rewiring probability')
@click.option('--m', 'm', type=int, help='barabasi_albert edges per new node')
@click.option('--seed', type=int, default=0, help='Seed for generation and distance sampling')
@click.option('--exact-distances/--sampled-distances', default=None,
              help='BFS from every node, or from --sample-size random sources (default: config exact_distances)')
@click.option('--sample-size', type=int, help='BFS sources when sampling distances (default: config sample_size)')
@click.option('--output', type=click.Path(), help='Write the CSV here instead of stdout')
@click.pass_context
@handle_errors
def summary(ctx, graph_paths, generator, n, p, k, beta, m, seed, exact_distances, sample_size, output):
    """Nodes, edges, average degree, average distance and diameter, one CSV row per network"""
    settings = load_config_manager(ctx).merge_with_cli_args({'exact_distances': exact_distances,
                                                             'sample_size': sample_size})
    exact_distances, sample_size = bool(settings['exact_distances']), settings['sample_size']
    sources = []
    for path in graph_paths:
        sources.append((Path(path).stem, load_graph(path, None, None, seed)))
    if not graph_paths:
        sources.append((generator or 'graph', load_graph(None, generator, n, seed, p=p, k=k, beta=beta, m=m)))

    buffer = StringIO()
    writer = csv.DictWriter(buffer, fieldnames=SUMMARY_COLUMNS, lineterminator='\n')
    writer.writeheader()
    for label, graph in sources:
        stats = graph_summary(graph, exact_distances=exact_distances, sample_size=sample_size, seed=seed)
        if stats.distances_on_lcc:
            status(f"⚠️  {label}: disconnected; distances use the largest component ({stats.lcc_nodes} nodes)")
        if stats.diameter_is_lower_bound:
            status(f"⚠️  {label}: diameter from sampled sources is a lower bound")
        writer.writerow(stats.as_row(label))

    if output:
        Path(output).write_text(buffer.getvalue())
        status(f"📄 Saved: {output}")
    else:
        click.echo(buffer.getvalue(), nl=False)


@click.command('gen-graph')
@graph_options
@click.option('--seed', type=int, required=True, help='Generator seed (required)')
@click.option('--output', type=click.Path(), help='Write the edge list here instead of stdout')
@click.pass_context
@handle_errors
def gen_graph(ctx, graph_path, generator, n, p, k, beta, m, seed, output):
    """Generate a seeded synthetic graph as an edge list"""
    if graph_path:
        raise click.UsageError('gen-graph takes --generator, not --graph')
    graph = load_graph(None, generator, n if n is not None else 1000, seed, p=p, k=k, beta=beta, m=m)
    text = write_edge_list(graph)
    if output:
        Path(output).write_text(text)
        status(f"📄 Saved: {output} ({graph.n} nodes, {graph.num_edges} edges)")
    else:
        click.echo(text, nl=False)
