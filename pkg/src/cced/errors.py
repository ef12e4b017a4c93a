"""Exception types shared across the package.

Shape and domain violations raise plain ``ValueError``; the classes here
exist for failures the CLI maps to distinct exit codes.
"""


class ShapeError(ValueError):
    """Operand dimensions do not match the operation's contract."""


class FormatError(Exception):
    """A binary or JSON artifact file is malformed."""


class ParseError(FormatError):
    """A text dataset file has a malformed row or line."""


class ConfigError(Exception):
    """A campaign configuration value is missing or invalid."""


class CampaignError(Exception):
    """A fault-injection campaign could not complete."""
