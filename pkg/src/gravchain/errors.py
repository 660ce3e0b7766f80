"""Exception types raised across the package."""


class GravchainError(Exception):
    pass


class DomainError(GravchainError, ValueError):
    """A numeric argument is outside the domain of the force law."""


class ConfigError(GravchainError):
    """Scenario or run configuration is inconsistent."""


class ValidationError(ConfigError):
    """Scenario document failed validation.

    ``errors`` holds ``(line, message)`` pairs; ``line`` is ``None`` for
    problems that are not tied to one line of the source document.
    """

    def __init__(self, errors):
        self.errors = list(errors)
        lines = []
        for line, msg in self.errors:
            lines.append(f"line {line}: {msg}" if line is not None else msg)
        super().__init__("; ".join(lines) if lines else "invalid scenario")


class ProtocolError(GravchainError):
    pass


class ExhaustedError(ProtocolError):
    """A consumer ran out of candidate suppliers."""
