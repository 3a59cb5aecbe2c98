"""Exception hierarchy and process exit codes.

Every failure the library raises deliberately derives from MotifsetError and
carries the exit code the command line maps it to:

    2  parameter / contract problems (bad arguments, degenerate windows in
       strict mode, overlapping candidates)
    3  infeasible request (k exceeds the non-overlapping window capacity)
    4  resource refusal (subset-count ceiling, memory budget, oracle size)
    5  input problems (missing file, unparseable line, NaN/Inf values)
"""

EXIT_OK = 0
EXIT_PARAMETER = 2
EXIT_FEASIBILITY = 3
EXIT_RESOURCE = 4
EXIT_INPUT = 5


class MotifsetError(Exception):
    exit_code = 1


class ParameterError(MotifsetError):
    """Invalid argument or violated call contract."""

    exit_code = EXIT_PARAMETER


class DegenerateWindowError(ParameterError):
    """A window has (near-)zero variance and the flatness policy is strict."""


class CandidateOverlapError(ParameterError):
    """A candidate set passed to an extent evaluation contains a trivial match."""


class FeasibilityError(MotifsetError):
    """No k pairwise non-overlapping windows exist for this series and length."""

    exit_code = EXIT_FEASIBILITY


class ResourceLimitError(MotifsetError):
    """The request was refused because a configured resource ceiling was hit."""

    exit_code = EXIT_RESOURCE


class CapacityError(ResourceLimitError):
    """Materializing the distance matrix would exceed the memory budget."""


class InputError(MotifsetError):
    """The input file or stream could not be read or validated."""

    exit_code = EXIT_INPUT
