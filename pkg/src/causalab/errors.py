"""Exception hierarchy shared across the workbench."""


class CausalabError(Exception):
    """Base class for all workbench errors."""


# --- tabular data ---

class EmptyFile(CausalabError):
    """CSV input has no header row."""


class RaggedRows(CausalabError):
    """A data row's length differs from the header length."""

    def __init__(self, row_index: int, expected: int, got: int):
        self.row_index = row_index
        super().__init__(
            f"row {row_index} has {got} fields, header has {expected}"
        )


class DuplicateHeader(CausalabError):
    """Two header fields share a name."""


class InvalidHeader(CausalabError):
    """A header field is empty."""


class TooFewRows(CausalabError):
    """Not enough complete rows left for discovery."""


# --- graphs ---

class NotADag(CausalabError):
    """Operation requires an acyclic, fully directed graph."""


class UnknownNode(CausalabError):
    """Node name not present in the graph."""


class SchemaViolation(CausalabError):
    """Graph JSON document does not match the schema."""


# --- independence tests ---

class SingularMatrix(CausalabError):
    """Correlation submatrix is not invertible at tolerance."""


class TooFewSamples(CausalabError):
    """Sample size too small for the requested test."""


class DegenerateVariable(CausalabError):
    """Variable has fewer than two observed levels."""


class MixedColumnKinds(CausalabError):
    """Dataset mixes continuous and categorical columns; tests need one kind."""


# --- discovery ---

class AlgorithmUnavailable(CausalabError):
    """Requested discovery algorithm is registered but not implemented."""


# --- repair ---

class StaleEdit(CausalabError):
    """Repair edit references an edge no longer present."""


# --- intervention ---

class NotDescendant(CausalabError):
    """Outcome is not downstream of the treatment."""


class SingularDesign(CausalabError):
    """Regression design matrix singular even after ridge jitter."""


# --- retrieval ---

class DuplicateId(CausalabError):
    """Two corpus snippets share an id."""


# --- orchestrator ---

class InvalidTransition(CausalabError):
    """Intent cannot run at the session's current stage."""


class VersionMismatch(CausalabError):
    """Checkpoint schema version (or fields) unknown to this build."""


class CorruptCheckpoint(CausalabError):
    """Checkpoint bytes cannot be decoded into a session state."""


# --- tool server ---

class DuplicateTool(CausalabError):
    """A tool with this name is already registered."""


class PathOutsideSandbox(CausalabError):
    """Requested file path escapes the configured sandbox root."""
