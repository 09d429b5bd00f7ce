from .app import app
from .handlers import (
    EXIT_HYPOTHESIS,
    EXIT_OK,
    EXIT_RESIDUAL,
    EXIT_USAGE,
    InputError,
    run_bregman_constants,
    run_pform,
    run_simulate,
    run_vague_limit,
    run_verify,
    verify_exit_code,
)

__all__ = [
    "app",
    "InputError",
    "EXIT_OK",
    "EXIT_RESIDUAL",
    "EXIT_HYPOTHESIS",
    "EXIT_USAGE",
    "run_verify",
    "run_pform",
    "run_bregman_constants",
    "run_vague_limit",
    "run_simulate",
    "verify_exit_code",
]
