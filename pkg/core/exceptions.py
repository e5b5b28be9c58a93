"""
Exception hierarchy shared by every app of the GEC system.
Management commands map these onto exit codes (see core.commands).
"""


class SGGECError(Exception):
    """Base class for all errors raised by the GEC system."""

    exit_code = 3


class ConfigurationError(SGGECError):
    exit_code = 2


class DimensionError(SGGECError):
    def __init__(self, op, *shapes):
        self.op = op
        self.shapes = shapes
        rendered = " and ".join(str(tuple(shape)) for shape in shapes)
        super().__init__(f"{op}: incompatible shapes {rendered}")


class DegenerateMaskError(SGGECError):
    pass


class GradientError(SGGECError):
    pass


class TreeError(SGGECError):
    pass


class ConllParseError(TreeError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class TokenizerError(SGGECError):
    pass


class CheckpointError(SGGECError):
    pass


class DataError(SGGECError):
    pass


class DivergenceError(SGGECError):
    exit_code = 4
