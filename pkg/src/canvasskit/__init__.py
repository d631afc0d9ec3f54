"""Reconcile election records across count phases and look for tabulation errors."""

from .records import (AuditRow, BatchSheet, CastVoteRecord, ImageRef, Manifest, ManifestEntry,
                      ParseError, PollbookSummary, PrecinctModeTally, TallyVector, VotingMode)

__version__ = "0.1.0"

__all__ = [
    "AuditRow", "BatchSheet", "CastVoteRecord", "ImageRef", "Manifest", "ManifestEntry",
    "ParseError", "PollbookSummary", "PrecinctModeTally", "TallyVector", "VotingMode",
]
