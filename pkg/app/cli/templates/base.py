from typing import Any

import click

from app.cli import string_constants as sc


class Template:
    """Container for the args passed to `click.echo`, plus the exit code.

    Supports unpacking (`**template`), iterating (`for i,j in template`)
    and indexing (`template[key]`)
    """

    def __init__(
        self, message: str, err: bool = False, exit_code: int = sc.EXIT_OK
    ):
        self._properties = {"message": message, "err": err}
        self.exit_code = exit_code

    def __contains__(self, key: str) -> bool:
        return key in self._properties

    def __getitem__(self, key) -> Any:
        return self._properties.get(key)

    def __iter__(self):
        return iter(self._properties.items())

    def __repr__(self) -> str:
        return (
            f"{self.__class__.__name__}({self._properties}, "
            f"exit_code={self.exit_code})"
        )

    def keys(self):
        return self._properties.keys()

    def values(self):
        return self._properties.values()


def answer(template: Template) -> None:
    """Print the template and leave with its exit code."""
    click.echo(**template)
    if template.exit_code != sc.EXIT_OK:
        raise click.exceptions.Exit(template.exit_code)
