class UnrestError(Exception):
    code = "E_UNREST"
    exit_code = 1


class InputError(UnrestError, ValueError):
    """Bad or inconsistent user-supplied data."""

    code = "E_INPUT"
    exit_code = 1


class InvariantError(UnrestError, RuntimeError):
    """An internal consistency check failed."""

    code = "E_INVARIANT"
    exit_code = 2
