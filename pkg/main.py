import logging

from app.cli import cli
from config import config

logging.getLogger("app").setLevel(config.log_level.upper())


if __name__ == "__main__":
    cli()
