"""
Exception types raised by the supertagger.
"""


class SupertagError(Exception):
    """Base class for all supertagger errors."""


class CategoryParseError(SupertagError, ValueError):
    """A category string does not follow the category grammar."""

    def __init__(self, message, text="", offset=0):
        super().__init__(f"{message} at offset {offset} in {text!r}")
        self.text = text
        self.offset = offset


class CorpusError(SupertagError, ValueError):
    """Malformed corpus, embedding or vocabulary file."""

    def __init__(self, message, path=None, line=None):
        where = ""
        if path is not None:
            where = f"{path}:"
        if line is not None:
            where += f"{line}: "
        elif where:
            where += " "
        super().__init__(f"{where}{message}")
        self.path = path
        self.line = line


class ConfigError(SupertagError, ValueError):
    """Invalid or unknown configuration value."""

    def __init__(self, message, key=None):
        super().__init__(f"{key}: {message}" if key else message)
        self.key = key


class ModelFormatError(SupertagError, ValueError):
    """A model file is truncated, has an unknown version or inconsistent dimensions."""


class DimensionError(SupertagError, ValueError):
    """Parameter shapes are inconsistent with the configuration."""


class GradientCheckError(SupertagError, FloatingPointError):
    """A perturbed loss evaluation produced a non-finite value."""
