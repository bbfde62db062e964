import functools
import logging

import numpy as np

from app.cli.templates import func
from app.cli.templates.base import answer
from app.exceptions import (
    ModelException,
    NumericalFailure,
    ParseError,
    PreconditionViolation,
)
from app.utils import log_handler

logger = logging.getLogger(__name__)
logger.addHandler(log_handler)

numerical_errors = (
    NumericalFailure,
    ArithmeticError,
    np.linalg.LinAlgError,
)


def handle_errors(command):
    """Turn the domain exceptions of a command into exit codes."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except ParseError as e:
            logger.info(f"Invalid input triggered {e!r}")
            answer(func.parse_error(e))
        except PreconditionViolation as e:
            logger.info(f"Precondition triggered {e!r}")
            answer(func.precondition_violation(e))
        except (*numerical_errors, ModelException) as e:
            logger.error(f"Error caught: {e!r} while running {command.__name__}")
            answer(func.numerical_failure(e))

    return wrapper
