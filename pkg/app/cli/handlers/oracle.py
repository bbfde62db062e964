import click

from app.cli import string_constants as sc
from app.cli.templates import func
from app.cli.templates.base import answer
from app.core.oracle import oracle_min_gtrs
from app.core.serialization import load_instance
from app.core.solver import solve
from app.exceptions import OracleInfeasible

from .common import budget_option, instance_argument, resolve, seed_option
from .errors import handle_errors


@click.command(sc.ORACLE_COMPARE_COMMAND)
@instance_argument
@seed_option
@budget_option
@handle_errors
def oracle_compare_command(instance_file, seed, budget):
    """Print solver and multistart oracle values side by side."""
    inst = load_instance(instance_file)
    seed, budget = resolve(seed, budget)
    report = solve(inst, seed=seed, budget=budget, use_oracle=False)
    try:
        oracle = oracle_min_gtrs(inst, seed=seed, budget=budget)
    except OracleInfeasible:
        oracle = None
    answer(func.show_oracle_compare(report, oracle, seed))
