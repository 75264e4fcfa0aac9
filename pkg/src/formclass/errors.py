"""Exception hierarchy shared across the package."""


class FormClassError(Exception):
    """Base class for all errors raised by this package."""


# --- lexicon parsing / validation ---

class LexiconError(FormClassError):
    """Base class for dataset parsing and validation errors."""

    def __init__(self, message, row=None):
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)
        self.row = row


class MalformedRow(LexiconError):
    """Wrong column count, or a header that does not match the schema."""


class UnknownLabel(LexiconError):
    """Allomorph, gender, etymology or type value outside the inventory,
    or an allomorph/type combination that contradicts the inventory."""


class EmptyForm(LexiconError):
    """Singular or plural form is empty."""


class DuplicatePair(LexiconError):
    """The same (lexeme, plural form) pair appears twice."""


class MissingOriginAnnotation(LexiconError):
    """An allomorph label has no origin annotation in the inventory."""


# --- information measures ---

class InvalidDistribution(FormClassError):
    """Probabilities are negative, do not sum to one, or the table is empty."""


class UnknownAxis(FormClassError):
    """An axis name is not present in the joint table."""


class ZeroNormalizer(FormClassError):
    """NMI requested against a normalizer with zero entropy."""


class AlignmentMismatch(FormClassError):
    """Model probabilities are not aligned 1:1 with the instance set."""


# --- neural training ---

class ShapeMismatch(FormClassError):
    """Parameter or input shapes are mutually inconsistent."""


class NonFiniteLoss(FormClassError):
    """Training loss became NaN or infinite; the run is aborted."""


# --- experiments / reporting ---

class TooFewInstances(FormClassError):
    """Fewer instances than folds requested."""


class InconsistentProvenance(FormClassError):
    """Report inputs were computed on different datasets or instance sets."""


class UnsupportedFormat(FormClassError):
    """Unknown serialization format requested."""
