"""Exception types shared across the library.

Each error carries an ``exit_code`` so the command line front end can map
failures onto its stable exit-code contract (3 = numerical failure,
4 = data insufficiency).
"""


class PrimoError(Exception):
    """Base class for all primo errors."""

    exit_code = 1


class DegenerateBasisError(PrimoError):
    """No radial basis function has support at the requested phase."""

    exit_code = 3


class DivergenceError(PrimoError):
    """Numerical integration produced a non-finite state."""

    exit_code = 3

    def __init__(self, step, message=None):
        self.step = int(step)
        super().__init__(message or f"non-finite state at step {self.step}")


class UndefinedSteeringError(PrimoError):
    """Steering angle undefined: zero velocity or coincident obstacle."""

    exit_code = 3


class InsufficientDataError(PrimoError):
    """Not enough usable samples for the requested operation."""

    exit_code = 4


class NonPhysicalFitError(PrimoError):
    """Fit produced parameters outside the physically meaningful range."""

    exit_code = 4


class DegenerateDataError(PrimoError):
    """Input data carries no usable variance."""

    exit_code = 4
