# coarsedecomp/errors.py

"""
errors.py

Exception hierarchy for coarsedecomp. Every error carries a short string
``code`` naming the failure (for reports) and the process ``exit_code`` the
command-line interface maps it to.

Classes:
    CoarseDecompError: Base class, a ValueError with a code.
    MetricError, GroupError, NormError, DecompositionError,
    MalformedCertificateError, SearchBudgetExceededError, ComplexError,
    SerializationError: Failure families raised by the modules.
"""

EXIT_OK = 0
EXIT_BAD_INPUT = 2
EXIT_INVALID = 3
EXIT_MALFORMED = 4
EXIT_STUCK = 5


class CoarseDecompError(ValueError):
    """
    Base class for all errors raised by the package.

    Attributes:
        code (str): Machine-readable failure name, e.g. ``"BALL_TOO_LARGE"``.
        exit_code (int): Exit status used by the CLI.
    """

    exit_code = EXIT_BAD_INPUT

    def __init__(self, code, message):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message


class MetricError(CoarseDecompError):
    """Raised for AMBIENT_MISMATCH, INFINITE_DIAMETER, NOT_A_METRIC and NOT_PROPER."""


class GroupError(CoarseDecompError):
    """Raised for BALL_TOO_LARGE, UNSUPPORTED_SUBGROUP and BAD_GROUP_SPEC."""

    def __init__(self, code, message):
        super().__init__(code, message)
        if code == "BALL_TOO_LARGE":
            self.exit_code = EXIT_STUCK


class NormError(CoarseDecompError):
    """
    Raised for DOMAIN_MISMATCH, SINGULAR_MATRIX, NOT_UNIPOTENT,
    THETA_NOT_EXPANDING and ENUMERATION_BUDGET_EXCEEDED.
    """

    def __init__(self, code, message):
        super().__init__(code, message)
        if code == "ENUMERATION_BUDGET_EXCEEDED":
            self.exit_code = EXIT_STUCK


class DecompositionError(CoarseDecompError):
    """
    Raised by strategies and the game engine: STRATEGY_STUCK,
    CHALLENGES_EXHAUSTED and NO_SUITABLE_STEP exit as stuck, NOT_LIPSCHITZ,
    BAD_CHALLENGE and the union checks as bad input.
    """

    STUCK_CODES = ("STRATEGY_STUCK", "CHALLENGES_EXHAUSTED", "NO_SUITABLE_STEP")

    def __init__(self, code, message):
        super().__init__(code, message)
        if code in self.STUCK_CODES:
            self.exit_code = EXIT_STUCK


class MalformedCertificateError(CoarseDecompError):
    """Raised when a certificate references points or members that do not exist."""

    exit_code = EXIT_MALFORMED

    def __init__(self, message):
        super().__init__("MALFORMED_CERTIFICATE", message)


class SearchBudgetExceededError(CoarseDecompError):
    """Raised when a search gives up before it could prove success or infeasibility."""

    exit_code = EXIT_STUCK

    def __init__(self, message):
        super().__init__("SEARCH_BUDGET_EXCEEDED", message)


class ComplexError(CoarseDecompError):
    """Raised for BAD_PARAMS, DIMENSION_CAP_EXCEEDED and UNSUPPORTED_DIMENSION."""


class SerializationError(CoarseDecompError):
    """Raised when a JSON document is missing fields or carries unreadable values."""

    exit_code = EXIT_MALFORMED

    def __init__(self, message):
        super().__init__("MALFORMED_FILE", message)
