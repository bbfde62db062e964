from .certify import certify_command
from .oracle import oracle_compare_command
from .slemma import slemma_command
from .solve import assumptions_command, solve_command

commands = (
    solve_command,
    slemma_command,
    assumptions_command,
    oracle_compare_command,
    certify_command,
)
