"""Logger and error types for ballbot-nav."""

import logging


class ConfigError(Exception):
    """Raised when a run config or a parameter set is invalid"""

    pass


class GeometryError(ConfigError):
    """Raised when the omniwheel geometry gives a singular coupling matrix"""

    pass


class PenetrationError(Exception):
    """Raised when the ball centre ends up below the terrain surface"""

    pass


class SimulationDivergedError(Exception):
    """Raised when a simulation step produces a non-finite state.

    The last finite state is kept on the exception as `last_state`.
    """

    def __init__(self, message: str, last_state=None):
        super().__init__(message)
        self.last_state = last_state


class ObservationError(Exception):
    """Raised when an observation vector cannot be assembled"""

    pass


class ShapeError(Exception):
    """Raised when an array does not have the shape a network expects"""

    pass


class UsageError(Exception):
    """Raised when a stateful object is used out of order (backward before forward)"""

    pass


class CheckpointError(Exception):
    """Raised when a checkpoint is corrupt, truncated or of another format version"""

    pass


class AlignmentError(Exception):
    """Raised when sequences that must be aligned have different lengths"""

    pass


class UpdateAbortedError(Exception):
    """Raised when a policy update produces a non-finite loss.

    The statistics gathered up to the failure are kept on the exception as `stats`.
    """

    def __init__(self, message: str, stats: dict | None = None):
        super().__init__(message)
        self.stats = stats or {}


class InsufficientDataError(Exception):
    """Raised when there is not enough data to train on"""

    pass


class TuningFailedError(Exception):
    """Raised when no gain set in the search range survives.

    The full search report (a DataFrame) is kept on the exception as `report`.
    """

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


# Configure Logging
logger = logging.getLogger(__name__)
shell_handler = logging.StreamHandler()  # Create terminal handler
logger.setLevel(logging.INFO)  # Set levels for the logger, shell and file
shell_handler.setLevel(logging.DEBUG)  # the logger level decides what gets through

# Format the outputs   "%(levelname)s (%(asctime)s): %(message)s"
fmt_shell = "%(levelname)s: %(message)s"

shell_formatter = logging.Formatter(fmt_shell)  # Create formatters
shell_handler.setFormatter(shell_formatter)  # Add formatters to handlers
logger.addHandler(shell_handler)  # Add handlers to the logger
