"""Exception hierarchy shared across the package."""


class QuestgenError(Exception):
    """Base class for all errors raised by this package."""


class InputError(QuestgenError):
    """Malformed input file or argument (CLI exit code 2)."""


class AnnotationError(QuestgenError):
    """A required annotation layer could not be produced."""


class ExtractionError(QuestgenError):
    """A sentence-question pair could not be turned into a rule."""


class RuleApplicationError(QuestgenError):
    """A rule does not apply to the target sentence (skipped during generation)."""
