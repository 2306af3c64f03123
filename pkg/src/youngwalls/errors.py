"""Exception hierarchy shared by the library and the CLI.

Each class carries the process exit code the CLI maps it to.
"""


class YoungWallsError(Exception):
    exit_code = 1


class UsageError(YoungWallsError, ValueError):
    """Bad arguments: malformed shapes, out-of-range parameters, mismatched variables."""

    exit_code = 2


class CapacityError(YoungWallsError):
    """A brute-force route or a rejection loop exceeded its configured budget."""

    exit_code = 3


class ConsistencyError(YoungWallsError):
    """An internal invariant failed (non-integral count, hash mismatch, inconsistent kernel)."""

    exit_code = 1


class DensityError(YoungWallsError):
    """A sampling density is not usable (non-positive mass, negative values, empty interval)."""

    exit_code = 1
