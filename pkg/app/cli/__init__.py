import click

from app.cli.handlers import commands


@click.group()
def cli():
    """Certified solver for interval-bounded quadratic problems."""


for command in commands:
    cli.add_command(command)
