"""Private lookups for peer-to-peer content retrieval."""

from ._core import (
    ClientKeys,
    ClientState,
    Database,
    DecryptionFailure,
    Error,
    InvalidArgument,
    SchemeMismatch,
    StoreCorruption,
    WireFormatError,
    cid_of,
    cpl,
    expected_sizes,
    extract,
    query,
    respond,
    schemes,
    sha256,
    simulate,
    target_index,
)

__all__ = [
    "ClientKeys",
    "ClientState",
    "Database",
    "DecryptionFailure",
    "Error",
    "InvalidArgument",
    "SchemeMismatch",
    "StoreCorruption",
    "WireFormatError",
    "cid_of",
    "cpl",
    "expected_sizes",
    "extract",
    "query",
    "respond",
    "schemes",
    "sha256",
    "simulate",
    "target_index",
]
