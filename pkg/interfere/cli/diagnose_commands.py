from pathlib import Path

import click

from ..core.dependency import (BRUTE_FORCE_CAP, degree_rate_report, dependency_brute_force,
                               dependency_from_decay_model, ht_summand_moments, radius_neighborhoods,
                               read_moments_csv, stein_bound_terms, weak_interference_diagnostic)
from ..core.executor import ReplicateExecutor
from ..core.graph import gen_random_graph
from ..core.outcomes import build_decay_model
from ..core.rng import STREAM_DIAGNOSTIC, derive_seed
from .utils import echo_json, graph_options, handle_errors, load_graph, parse_list, status


@click.command('diagnose-dependency')
@graph_options
@click.option('--rho-max', type=int, required=True, help='Interference radius of the decay model')
@click.option('--seed', type=int, default=0, help='Seed for graph, direct effects and draws')
@click.option('--brute-force', is_flag=True, help=f'Cross-check by probing a decay model (n <= {BRUTE_FORCE_CAP})')
@click.option('--gamma', type=float, default=0.5, help='Decay rate for probing and the weak-interference check')
@click.option('--sizes', help='Comma-separated graph sizes for a degree-rate report (generator graphs only)')
@click.option('--weak-h', type=int, help='Run the weak-interference check with radius-h neighborhoods')
@click.option('--samples', type=int, default=20, help='Assignments sampled by the weak-interference check')
@click.option('--pi', type=float, default=0.5, help='Treatment probability for sampled assignments')
@click.option('--edges-out', type=click.Path(), help='Write the dependency graph as an edge list')
@click.pass_context
@handle_errors
def diagnose_dependency(ctx, graph_path, generator, n, p, k, beta, m, rho_max, seed, brute_force, gamma, sizes,
                        weak_h, samples, pi, edges_out):
    """Dependency graph of the decay model, degree rates and interference diagnostics"""
    graph = load_graph(graph_path, generator, n, seed, p=p, k=k, beta=beta, m=m)
    dependency = dependency_from_decay_model(graph, rho_max)
    report = {
        'nodes': graph.n,
        'rho_max': rho_max,
        'max_degree': dependency.max_degree,
        'mean_degree': float(dependency.degrees.mean()) if graph.n else 0.0,
        'edges': len(dependency.edges()),
    }

    if edges_out:
        Path(edges_out).write_text(dependency.to_edge_list())
        status(f"📄 Saved: {edges_out}")

    if brute_force or weak_h is not None:
        model = build_decay_model(graph, rho_max, gamma, seed=seed)

    if brute_force:
        exhaustive = dependency_brute_force(model, executor=ReplicateExecutor(ctx.obj.get('max_workers') or 1))
        report['brute_force_agrees'] = exhaustive.same_edges(dependency)
        report['brute_force_max_degree'] = exhaustive.max_degree

    if weak_h is not None:
        weak = weak_interference_diagnostic(model, radius_neighborhoods(graph, weak_h), samples,
                                            derive_seed(seed, STREAM_DIAGNOSTIC), pi)
        report['weak_interference'] = {'h': weak_h, 'samples': samples, 'max': weak.maximum, 'mean': weak.mean}

    size_list = parse_list(sizes, int)
    if size_list:
        if not generator:
            raise click.UsageError('--sizes needs --generator')
        sequence = []
        for size in size_list:
            g = gen_random_graph(generator, size, seed, p=p, k=k, beta=beta, m=m)
            sequence.append((size, dependency_from_decay_model(g, rho_max).max_degree))
        rates = degree_rate_report(sequence)
        report['degree_rate'] = {
            'rows': rates.rows(),
            'slope': rates.slope,
            'quarter_trend': rates.trend_quarter,
            'third_trend': rates.trend_third,
            'flag_quarter': rates.flag_quarter,
            'flag_third': rates.flag_third,
            'note': rates.NOTE,
        }

    echo_json(report)


@click.command('stein-bound')
@graph_options
@click.option('--moments', type=click.Path(), help='CSV of per-unit (E X^4, E|X|^3) rows instead of a model')
@click.option('--d', 'd', type=int, help='Dependency degree (with --moments)')
@click.option('--sigma-sq', type=float, help='Variance of the sum (with --moments)')
@click.option('--rho-max', type=int, help='Interference radius of the decay model')
@click.option('--gamma', type=float, default=0.5, help='Decay rate of the decay model')
@click.option('--pi', type=float, default=0.5, help='Treatment probability')
@click.option('--replicates', type=int, default=2000, help='Monte Carlo draws for the summand moments')
@click.option('--seed', type=int, default=0, help='Seed for graph, direct effects and draws')
@click.option('--c1', type=float, default=1.0, help='Constant multiplying the first term')
@click.option('--c2', type=float, default=1.0, help='Constant multiplying the second term')
@click.pass_context
@handle_errors
def stein_bound(ctx, graph_path, generator, n, p, k, beta, m, moments, d, sigma_sq, rho_max, gamma, pi, replicates,
                seed, c1, c2):
    """Dependency-graph normal-approximation bound terms (constants unspecified)"""
    if moments:
        if d is None or sigma_sq is None:
            raise click.UsageError('--moments needs --d and --sigma-sq')
        report = stein_bound_terms(read_moments_csv(moments), d, sigma_sq, c1, c2)
        echo_json(report.to_dict())
        return

    if rho_max is None:
        raise click.UsageError('give --moments, or a graph with --rho-max')
    graph = load_graph(graph_path, generator, n, seed, p=p, k=k, beta=beta, m=m)
    model = build_decay_model(graph, rho_max, gamma, seed=seed)
    degree = dependency_from_decay_model(graph, rho_max).max_degree
    summands = ht_summand_moments(model, pi, replicates, derive_seed(seed, STREAM_DIAGNOSTIC),
                                  ReplicateExecutor(ctx.obj.get('max_workers') or 1))
    report = stein_bound_terms(summands.as_pairs(), degree, summands.sigma_sq, c1, c2)
    echo_json({**report.to_dict(), 'nodes': graph.n, 'rho_max': rho_max, 'gamma': gamma, 'replicates': replicates})
