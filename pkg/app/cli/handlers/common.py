from pathlib import Path
from typing import Optional

import click

from app.cli import string_constants as sc
from config import config

instance_argument = click.argument(
    "instance_file", type=click.Path(dir_okay=False, path_type=Path)
)
seed_option = click.option(
    sc.SEED_OPTION,
    "seed",
    type=click.IntRange(min=0),
    default=None,
    help="Random seed (defaults to GTRS_SEED).",
)
budget_option = click.option(
    sc.BUDGET_OPTION,
    "budget",
    type=click.IntRange(min=1),
    default=None,
    help="Oracle multistart budget (defaults to GTRS_ORACLE_BUDGET).",
)
json_option = click.option(
    sc.JSON_OPTION,
    "as_json",
    is_flag=True,
    default=False,
    help="Print the machine-readable report.",
)


def resolve(seed: Optional[int], budget: Optional[int]) -> tuple[int, int]:
    seed = config.seed if seed is None else seed
    budget = config.oracle_budget if budget is None else budget
    return seed, budget
