import click

from ..core.estimators import Assignment, diff_in_means, horvitz_thompson, read_assignment_csv, read_column_csv
from ..core.exceptions import ParameterError
from ..core.variance import combined_variance, confidence_interval, neyman_sutva_variance, vtau_plugin
from .utils import echo_json, handle_errors


@click.command('estimate')
@click.option('--treatments', type=click.Path(), required=True, help='CSV with one 0/1 treatment column')
@click.option('--outcomes', type=click.Path(), required=True, help='CSV with one outcome column')
@click.option('--level', type=float, default=0.95, help='Confidence level')
@click.option('--pi', type=float, help='Design treatment probability; adds the Horvitz-Thompson estimate')
@click.pass_context
@handle_errors
def estimate(ctx, treatments, outcomes, level, pi):
    """Difference in means, variance estimates and a confidence interval as JSON"""
    a: Assignment = read_assignment_csv(treatments)
    y = read_column_csv(outcomes)
    if y.size != a.n:
        raise ParameterError(f"{treatments} has {a.n} rows but {outcomes} has {y.size}")

    tau_hat = diff_in_means(a, y)
    v_sutva = neyman_sutva_variance(a, y)
    v_tau = vtau_plugin(a, y)
    v_combined = combined_variance(a, y)
    interval = confidence_interval(tau_hat, max(v_combined, 0.0), level)

    result = {
        'n': a.n,
        'n1': a.n1,
        'n0': a.n0,
        'tau_hat': tau_hat,
        'v_sutva': v_sutva,
        'v_tau': v_tau,
        'v_combined': v_combined,
        'ci': interval.to_dict(),
    }
    if pi is not None:
        result['tau_ht'] = horvitz_thompson(a, y, pi)
    echo_json(result)
