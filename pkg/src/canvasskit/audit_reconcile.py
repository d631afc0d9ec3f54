"""Match hand-count batch sheets against the audit spreadsheet.

Matching runs in two passes.  Pass 1 pairs a sheet with a row when both the
normalized batch identifier and the (trump, biden, jorgensen) counts agree.
Pass 2 pairs leftovers on counts alone, but only when a count triple is held
by exactly one leftover sheet and exactly one leftover row; identical counts
in genuinely different batches are common, so anything less than a unique
pairing is reported as ambiguous instead of guessed.
"""

from __future__ import annotations

import logging
import re
from collections import defaultdict, deque
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from typing import Iterable, Optional, Sequence

from .records import CANDIDATE_FIELDS, AuditRow, BatchSheet, TallyVector

log = logging.getLogger(__name__)

# Words that carry no batch identity in free-text labels.  "ballot" is here
# because transcribed rows use it where "batch" was meant.
FILLER_WORDS = frozenset({
    "scanner", "batch", "ballot", "ballots", "no", "number",
    "absentee", "advance", "election", "day", "provisional", "mail", "by", "in", "person",
})

_RANGE_RE = re.compile(r"(\w+)\s*(?:--|–|—)\s*(\w+)")
_SPLIT_RE = re.compile(r"[\s,;:#/_()\[\]{}.]+")


def normalize_batch_id(text: str) -> tuple[str, ...]:
    """Reduce a free-text batch label to comparable tokens.

    Rules, applied in order: case-fold; rewrite ``a--b`` / en- or em-dash
    ranges to the single token ``a-b``; split on whitespace and punctuation
    other than ``-``; drop :data:`FILLER_WORDS`; strip leading zeros from
    purely numeric tokens.

    >>> normalize_batch_id("Absentee Scanner 2 Batch 400")
    ('2', '400')
    >>> normalize_batch_id("3 12--14")
    ('3', '12-14')
    """
    text = _RANGE_RE.sub(r"\1-\2", text.casefold())
    out = []
    for tok in _SPLIT_RE.split(text):
        tok = tok.strip("-")
        if not tok or tok in FILLER_WORDS:
            continue
        if tok.isdigit():
            tok = str(int(tok))
        out.append(tok)
    return tuple(out)


def sheet_key(sheet: BatchSheet) -> tuple[str, ...]:
    return normalize_batch_id(f"{sheet.location_or_scanner} {sheet.batch_label}")


def row_key(row: AuditRow) -> tuple[str, ...]:
    return normalize_batch_id(row.batch_name)


def _known_candidates(tally: TallyVector) -> Optional[tuple[int, int, int]]:
    cands = tally.candidates
    return None if any(v is None for v in cands) else cands  # type: ignore[return-value]


@dataclass(frozen=True)
class Match:
    sheet: BatchSheet
    row: AuditRow
    via: str  # "exact" or "tally"
    sheet_key: tuple[str, ...]
    row_key: tuple[str, ...]
    sheet_index: int
    row_index: int

    @property
    def labels_agree(self) -> bool:
        return self.sheet_key == self.row_key


@dataclass(frozen=True)
class TallyCollision:
    """A missing sheet whose counts equal an already-claimed row."""

    sheet_index: int
    row_index: int
    row: AuditRow


@dataclass
class MatchResult:
    matched: list[Match] = field(default_factory=list)
    missing_sheets: list[BatchSheet] = field(default_factory=list)
    unmatched_rows: list[AuditRow] = field(default_factory=list)
    ambiguous: list[tuple[BatchSheet, list[AuditRow]]] = field(default_factory=list)
    missing_indices: list[int] = field(default_factory=list)
    # missing sheet index -> rows (claimed by other sheets) with the same counts
    tally_collisions: dict[int, list[TallyCollision]] = field(default_factory=dict)

    @property
    def pairs(self) -> list[tuple[BatchSheet, AuditRow]]:
        return [(m.sheet, m.row) for m in self.matched]


def match_sheets(sheets: Sequence[BatchSheet], rows: Sequence[AuditRow]) -> MatchResult:
    """Pair sheets with rows one-to-one; see the module docstring for the rules."""
    skeys = [sheet_key(s) for s in sheets]
    rkeys = [row_key(r) for r in rows]
    stally = [_known_candidates(s.tally) for s in sheets]

    exact_index: dict[tuple, deque[int]] = defaultdict(deque)
    for j, r in enumerate(rows):
        exact_index[(rkeys[j], r.tally)].append(j)

    sheet_match: dict[int, tuple[int, str]] = {}
    row_taken = [False] * len(rows)
    for i, s in enumerate(sheets):
        if stally[i] is None:
            continue
        bucket = exact_index.get((skeys[i], stally[i]))
        if bucket:
            j = bucket.popleft()
            sheet_match[i] = (j, "exact")
            row_taken[j] = True

    left_rows: dict[tuple, list[int]] = defaultdict(list)
    for j, r in enumerate(rows):
        if not row_taken[j]:
            left_rows[r.tally].append(j)
    left_sheets: dict[tuple, list[int]] = defaultdict(list)
    for i in range(len(sheets)):
        if i not in sheet_match and stally[i] is not None:
            left_sheets[stally[i]].append(i)

    ambiguous_idx: dict[int, list[int]] = {}
    for tally, sheet_ids in left_sheets.items():
        cands = left_rows.get(tally, [])
        if len(cands) == 1 and len(sheet_ids) == 1:
            sheet_match[sheet_ids[0]] = (cands[0], "tally")
            row_taken[cands[0]] = True
        elif cands:
            for i in sheet_ids:
                ambiguous_idx[i] = list(cands)

    all_rows_by_tally: dict[tuple, list[int]] = defaultdict(list)
    for j, r in enumerate(rows):
        all_rows_by_tally[r.tally].append(j)

    result = MatchResult()
    for i, s in enumerate(sheets):
        if i in sheet_match:
            j, via = sheet_match[i]
            m = Match(s, rows[j], via, skeys[i], rkeys[j], i, j)
            result.matched.append(m)
            if via == "tally":
                log.info("tally-only match: sheet %s %r (key %s) -> row %r (key %s)",
                         s.source_page, s.batch_label, skeys[i], rows[j].batch_name, rkeys[j])
        elif i in ambiguous_idx:
            result.ambiguous.append((s, [rows[j] for j in ambiguous_idx[i]]))
        else:
            result.missing_sheets.append(s)
            result.missing_indices.append(i)
            if stally[i] is not None:
                hits = [TallyCollision(i, j, rows[j]) for j in all_rows_by_tally.get(stally[i], [])
                        if rkeys[j] != skeys[i]]
                if hits:
                    result.tally_collisions[i] = hits
                    for h in hits:
                        log.info("missing sheet %s %r shares counts with row %r (labels differ: %s vs %s)",
                                 s.source_page, s.batch_label, h.row.batch_name, skeys[i], rkeys[h.row_index])
    result.unmatched_rows = [r for j, r in enumerate(rows) if not row_taken[j]]
    return result


@dataclass(frozen=True)
class OmissionImpact:
    """Votes recorded on sheets that never reached the audit totals.

    ``write_in_deficit`` is ``None`` when any sheet left write-ins blank;
    ``write_in_known`` still holds the sum over the sheets that did not.
    """

    trump: int = 0
    biden: int = 0
    jorgensen: int = 0
    write_in_deficit: Optional[int] = 0
    write_in_known: int = 0
    unknown_fields: frozenset[str] = frozenset()

    @property
    def total_known(self) -> int:
        return self.trump + self.biden + self.jorgensen

    def __add__(self, other: "OmissionImpact") -> "OmissionImpact":
        wi = None
        if self.write_in_deficit is not None and other.write_in_deficit is not None:
            wi = self.write_in_deficit + other.write_in_deficit
        return OmissionImpact(self.trump + other.trump, self.biden + other.biden,
                              self.jorgensen + other.jorgensen, wi,
                              self.write_in_known + other.write_in_known,
                              self.unknown_fields | other.unknown_fields)


def omission_impact(missing: Iterable[BatchSheet]) -> OmissionImpact:
    sums = dict.fromkeys(CANDIDATE_FIELDS, 0)
    write_in = 0
    unknown: set[str] = set()
    for sheet in missing:
        for name in CANDIDATE_FIELDS:
            value = getattr(sheet.tally, name)
            if value is None:
                unknown.add(name)
            else:
                sums[name] += value
        if sheet.tally.write_in is None:
            unknown.add("write_in")
        else:
            write_in += sheet.tally.write_in
    return OmissionImpact(sums["trump"], sums["biden"], sums["jorgensen"],
                          None if "write_in" in unknown else write_in, write_in,
                          frozenset(unknown))


def discrepancy_rate(error_votes: int, base_votes: int) -> Decimal:
    """Return ``error_votes / base_votes`` as a percentage with 4 decimals.

    >>> discrepancy_rate(634, 524659)
    Decimal('0.1208')
    """
    if base_votes <= 0:
        raise ValueError("base_votes must be positive")
    if error_votes < 0:
        raise ValueError("error_votes must be non-negative")
    return (Decimal(error_votes) * 100 / Decimal(base_votes)).quantize(
        Decimal("0.0001"), rounding=ROUND_HALF_UP)


@dataclass(frozen=True)
class DuplicateCensus:
    count: int
    groups: list[list[int]]  # row indices, one list per repeated (county, tally)


def duplicate_row_census(rows: Sequence[AuditRow]) -> DuplicateCensus:
    """Count rows whose counts repeat another row's within the same county."""
    by_key: dict[tuple, list[int]] = {}
    for j, r in enumerate(rows):
        by_key.setdefault((r.county, r.trump, r.biden, r.jorgensen), []).append(j)
    groups = [ix for ix in by_key.values() if len(ix) > 1]
    return DuplicateCensus(sum(len(g) for g in groups), groups)


def audit_totals(rows: Iterable[AuditRow]) -> dict[str, int]:
    totals = dict.fromkeys(CANDIDATE_FIELDS, 0)
    for r in rows:
        totals["trump"] += r.trump
        totals["biden"] += r.biden
        totals["jorgensen"] += r.jorgensen
    return totals
