"""Exception hierarchy.

Everything raised for bad physical input derives from :class:`DomainError`
so the CLI can map it to a single exit status.
"""


class DomainError(ValueError):
    """Input outside the domain of a physical formula."""


class UnsupportedRegimeError(DomainError):
    """Valid numbers, but a regime the models here do not cover."""


class FitError(DomainError):
    """A fit could not be carried out on the supplied data."""


class InsufficientRingingError(DomainError):
    """Too few post-resonance zero crossings to analyse ringing."""


class BracketError(DomainError):
    """A root/threshold search bracket does not contain a solution."""


class IntegrationError(RuntimeError):
    """The ODE integrator gave up.  ``time`` is where it stopped."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class ConfigError(ValueError):
    """Experiment configuration could not be parsed or validated.

    ``path`` is the dotted field path (``cavity.waist_v_um``) when known.
    """

    def __init__(self, message, path=None):
        if path:
            message = f"{path}: {message}"
        super().__init__(message)
        self.path = path


class SchemaError(ValueError):
    """A CSV file is missing required columns or rows."""
