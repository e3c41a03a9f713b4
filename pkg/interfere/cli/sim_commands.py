import click

from .utils import execute_study, handle_errors, parse_list, sim_options


def _study_args(graph_path, generator, n, p, k, beta, m, seed, graph_seed, pi, gamma_list, rho_max_list,
                instances, replicates, alpha_mean_treated, alpha_mean_control, direct_effect, redraw_budget, out_dir,
                **extra):
    args = {
        'graph': graph_path,
        'generator': generator,
        'n': n,
        'p': p,
        'k': k,
        'beta': beta,
        'm': m,
        'seed': seed,
        'graph_seed': graph_seed,
        'pi': pi,
        'gamma_list': parse_list(gamma_list, float),
        'rho_max_list': parse_list(rho_max_list, int),
        'instances': instances,
        'replicates': replicates,
        'alpha_mean_treated': alpha_mean_treated,
        'alpha_mean_control': alpha_mean_control,
        'direct_effect': direct_effect,
        'redraw_budget': redraw_budget,
        'out_dir': out_dir,
    }
    if graph_path or generator:
        # a graph given on the command line replaces any configured graph list
        args['graphs'] = []
    args.update(extra)
    return args


@click.command('sim-normality')
@sim_options
@click.pass_context
@handle_errors
def sim_normality(ctx, progress, **options):
    """Shapiro-Wilk normality of tau_hat over the (graph, rho_max, gamma) grid"""
    from ..services.normality_study import NormalityStudyService
    execute_study(ctx, NormalityStudyService, 'normality', _study_args(**options), progress)


@click.command('sim-variance')
@sim_options
@click.pass_context
@handle_errors
def sim_variance(ctx, progress, **options):
    """Variance decomposition of tau_hat over the (rho_max, gamma) grid"""
    from ..services.variance_study import VarianceStudyService
    execute_study(ctx, VarianceStudyService, 'variance', _study_args(**options), progress)


@click.command('sim-coverage')
@click.option('--level', type=float, help='Confidence level (default 0.95)')
@sim_options
@click.pass_context
@handle_errors
def sim_coverage(ctx, level, progress, **options):
    """Confidence-interval coverage over the (rho_max, gamma) grid"""
    from ..services.coverage_study import CoverageStudyService
    execute_study(ctx, CoverageStudyService, 'coverage', _study_args(level=level, **options), progress)
