"""Circle maps, Herman's invariant-graph correspondence and non-KAM invariant circles."""
from .circlemap import CircleLift, derivative_stack, inverse_derivative_stack, invert, iterate, \
    rigid_rotation
from .errors import AliasingError, BracketError, BudgetError, CertificateError, ModeLockedError
from .families import arnold, modified_f, modified_g, nonkam_g
from .rotation import compare_rotation, mode_lock_interval, rotation_number, solve_parameter

__version__ = "0.1.0"

__all__ = [
    "AliasingError", "BracketError", "BudgetError", "CertificateError", "CircleLift",
    "ModeLockedError", "arnold", "compare_rotation", "derivative_stack",
    "inverse_derivative_stack", "invert", "iterate", "mode_lock_interval", "modified_f",
    "modified_g", "nonkam_g", "rigid_rotation", "rotation_number", "solve_parameter",
]
