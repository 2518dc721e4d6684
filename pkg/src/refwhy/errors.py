"""Exception hierarchy shared across the pipeline."""


class RefwhyError(Exception):
    """Base class for all errors raised by this package."""


# -- repository mining ------------------------------------------------------

class RepoNotFound(RefwhyError):
    """The given path is not a readable git repository."""


class CorruptHistory(RefwhyError):
    """An object in the repository could not be read; carries the hash."""

    def __init__(self, commit_id: str, detail: str = ""):
        self.commit_id = commit_id
        super().__init__(f"unreadable object {commit_id}" + (f": {detail}" if detail else ""))


class EmptyIdentity(RefwhyError):
    """Both author name and email are blank."""


# -- refactoring ingestion ---------------------------------------------------

class MalformedJson(RefwhyError):
    """Input file is not RefactoringMiner-shaped JSON."""


class UnknownRefactoringType(RefwhyError):
    """A refactoring entry names a type outside the canonical taxonomy."""

    def __init__(self, type_name: str, commit_id: str):
        self.type_name = type_name
        self.commit_id = commit_id
        super().__init__(f"unknown refactoring type {type_name!r} in commit {commit_id}")


# -- metrics -----------------------------------------------------------------

class MalformedCsv(RefwhyError):
    """Product metrics CSV is missing required header columns."""


# -- sampling ----------------------------------------------------------------

class DomainError(RefwhyError):
    """A numeric argument is outside its valid domain."""


class InsufficientPool(RefwhyError):
    """The remaining pool is smaller than the requested sample."""


# -- statistics --------------------------------------------------------------

class DegenerateTable(RefwhyError):
    """Chance agreement is 1, so kappa is undefined."""


class TooFewSamples(RefwhyError):
    """Not enough observations for the requested test."""


class ZeroVariance(RefwhyError):
    """A sample is constant, so the statistic is undefined."""


class LengthMismatch(RefwhyError):
    """Paired samples have different lengths."""


class SingleClass(RefwhyError):
    """The training labels contain fewer than two classes."""


class EmptyDataset(RefwhyError):
    """The dataset has no rows."""


# -- LLM orchestration -------------------------------------------------------

class BudgetExceeded(RefwhyError):
    """The prompt cannot fit the context budget even with an empty diff."""


class ContextOverflow(RefwhyError):
    """The endpoint rejected the request as exceeding its context window."""


class EndpointUnreachable(RefwhyError):
    """All retries against a model endpoint failed."""


class MalformedModelOutput(RefwhyError):
    """The model response failed schema parsing even after a reprompt."""


class InsufficientRecords(RefwhyError):
    """Fewer records available than the requested validation sample."""


# -- pipeline ----------------------------------------------------------------

class ConfigError(RefwhyError):
    """The configuration file is invalid or incomplete."""


class MissingStageInput(RefwhyError):
    """A pipeline stage was invoked before its input stage produced output."""
