"""Exception hierarchy shared by every module of the package."""


class TwistFloerError(Exception):
    """Base class; the CLI maps these to exit status 1."""

    code = "error"

    def to_dict(self):
        return {"error": self.code, "message": str(self)}


class RingNotEuclideanError(TwistFloerError):
    code = "ring-not-euclidean"


class ShapeError(TwistFloerError):
    code = "shape"


class InvalidComplexError(TwistFloerError):
    code = "invalid-complex"


class CommutationError(TwistFloerError):
    code = "commutation"


class TagError(TwistFloerError):
    code = "tag"


class SpecError(TwistFloerError):
    code = "spec"


class FormulaRangeError(TwistFloerError):
    code = "formula-out-of-range"


class TruncationError(TwistFloerError):
    code = "truncation"

    def __init__(self, message, suggested_n=None):
        super().__init__(message)
        self.suggested_n = suggested_n


class DegenerateFormError(TwistFloerError):
    code = "degenerate-form"


class AmbiguousTriangleError(TwistFloerError):
    code = "ambiguous-triangle"


class InconsistentInputError(TwistFloerError):
    code = "inconsistent-input"


class ZeroTwistError(TwistFloerError):
    code = "zero-twist"


class UnsupportedError(TwistFloerError):
    code = "unsupported"


class FamilyOutOfScopeError(TwistFloerError):
    code = "family-out-of-scope"


class HypothesisNotMetError(TwistFloerError):
    code = "hypothesis-not-met"


class ParseError(TwistFloerError):
    code = "parse"

    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column

    def to_dict(self):
        d = super().to_dict()
        if self.line is not None:
            d["line"] = self.line
            d["column"] = self.column
        return d
