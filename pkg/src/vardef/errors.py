"""Exception hierarchy shared by all toolkit modules.

The CLI maps these onto exit codes: usage errors exit 1 (argparse level),
any DataError exits 2, everything else exits 3.
"""


class VardefError(Exception):
    """Base class for all toolkit errors."""


class DataError(VardefError):
    """Invalid input data: bad files, broken invariants, infeasible requests."""


class ParseError(DataError):
    """A file could not be parsed. Message carries path and line number."""


class InvariantError(DataError):
    """A domain-type invariant was violated by otherwise parseable data."""


class DuplicateDocIdError(InvariantError):
    """Two documents in one corpus share a doc_id."""
