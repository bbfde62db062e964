from pathlib import Path

import click

from app.cli import string_constants as sc
from app.cli.templates import func
from app.cli.templates.base import answer
from app.core.serialization import load_certificate, load_instance
from app.core.verification import verify_certificate

from .common import instance_argument
from .errors import handle_errors


@click.command(sc.CERTIFY_COMMAND)
@instance_argument
@click.argument(
    "certificate_file", type=click.Path(dir_okay=False, path_type=Path)
)
@handle_errors
def certify_command(instance_file, certificate_file):
    """Check a certificate file against the instance."""
    inst = load_instance(instance_file)
    cert = load_certificate(certificate_file)
    answer(func.show_certificate_verdict(cert, verify_certificate(inst, cert)))
