import logging

import click

from app.cli import string_constants as sc
from app.cli.templates import func
from app.cli.templates.base import answer
from app.core.serialization import load_instance
from app.core.slemma import SLEMMA_KINDS, slemma_for_instance
from app.core.verification import verify_certificate
from app.exceptions import NumericalFailure
from app.utils import log_handler

from .common import budget_option, instance_argument, json_option, resolve, seed_option
from .errors import handle_errors

logger = logging.getLogger(__name__)
logger.addHandler(log_handler)


@click.command(sc.SLEMMA_COMMAND)
@instance_argument
@click.option(
    sc.KIND_OPTION,
    "kind",
    type=click.Choice(SLEMMA_KINDS),
    default="interval",
    show_default=True,
)
@seed_option
@budget_option
@json_option
@handle_errors
def slemma_command(instance_file, kind, seed, budget, as_json):
    """Decide the S-lemma system induced by the instance."""
    inst = load_instance(instance_file)
    seed, budget = resolve(seed, budget)
    run = slemma_for_instance(inst, kind, seed=seed, budget=budget)
    if not verify_certificate(run.instance, run.verdict.certificate):
        raise NumericalFailure(
            f"{run.verdict.certificate.kind} certificate failed verification"
        )
    answer(func.show_slemma_verdict(run.verdict, as_json, seed))
    logger.info(f"SUCCESS, {run.verdict.kind.value} for {instance_file}")
