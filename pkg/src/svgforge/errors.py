"""Exception types shared across the toolkit."""


class SvgForgeError(Exception):
    """Base class for all toolkit errors."""


class SvgSyntaxError(SvgForgeError):
    """Input text is not well-formed XML or violates SVG structure rules."""


class UnsupportedElementError(SvgForgeError):
    """Element or attribute outside the supported SVG subset."""


class BadNumberError(SvgForgeError):
    """Numeric attribute that cannot be parsed."""


class DegenerateViewBoxError(SvgForgeError):
    """viewBox with non-positive width or height."""


class RenderError(SvgForgeError):
    """Rasterization failed (e.g. non-finite coordinate after transform)."""


class DimensionMismatchError(SvgForgeError):
    """Image operands have incompatible dimensions."""


class TokenizeError(SvgForgeError):
    """Text cannot be encoded under the current vocabulary settings."""


class TokenRangeError(TokenizeError):
    """Integer part of a numeric literal is outside the token range."""


class UnknownTokenIdError(SvgForgeError):
    """Token id not present in the vocabulary."""


class MissingSubwordError(SvgForgeError):
    """Base embedding lookup failed for a subword."""


class EmbedderError(SvgForgeError):
    """Embedding backend failed or is unreachable."""


class ZeroGroundTruthLengthError(SvgForgeError):
    """Ground-truth code length must be positive."""


class LengthMismatchError(SvgForgeError):
    """Per-token arrays have different lengths."""


class NonFiniteRatioError(SvgForgeError):
    """Probability ratio would overflow to a non-finite value."""


class EmptyGroupError(SvgForgeError):
    """Rollout group contains no trajectories."""


class MissingFieldError(SvgForgeError):
    """Task sample violates its task-variant invariant."""


class SchemaError(SvgForgeError):
    """Dataset record does not match the JSONL schema."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line
