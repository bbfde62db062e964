import logging

import click

from app.cli import string_constants as sc
from app.cli.templates import func
from app.cli.templates.base import answer
from app.core.serialization import load_instance
from app.core.solver import check_assumptions, solve
from app.utils import log_handler

from .common import budget_option, instance_argument, json_option, resolve, seed_option
from .errors import handle_errors

logger = logging.getLogger(__name__)
logger.addHandler(log_handler)


@click.command(sc.SOLVE_COMMAND)
@instance_argument
@seed_option
@budget_option
@json_option
@handle_errors
def solve_command(instance_file, seed, budget, as_json):
    """Solve the instance and print a certified report."""
    inst = load_instance(instance_file)
    seed, budget = resolve(seed, budget)
    report = solve(inst, seed=seed, budget=budget)
    answer(func.show_solve_report(report, as_json))
    logger.info(f"SUCCESS, solved {instance_file}")


@click.command(sc.ASSUMPTIONS_COMMAND)
@instance_argument
@seed_option
@budget_option
@handle_errors
def assumptions_command(instance_file, seed, budget):
    """Check Items 1-5 and print their witnesses."""
    inst = load_instance(instance_file)
    seed, budget = resolve(seed, budget)
    report = check_assumptions(inst, seed=seed, budget=budget)
    answer(func.show_assumptions(report, seed))
