"""Record types and canonical CSV readers/writers.

Every file format consumed by the toolkit is a comma-delimited UTF-8 file
with a fixed header.  Readers accept either a path or an open text stream
and raise :class:`ParseError` (or a subclass) carrying the line number and
column name of the offending cell.  Blank numeric cells in batch sheets are
read as ``None`` (unknown), never as zero.
"""

from __future__ import annotations

import csv
import enum
import io
import os
import re
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator, Mapping, NamedTuple, Optional, Sequence, Union

Source = Union[str, os.PathLike, IO[str]]

CVR_HEADER = ("cvr_id", "scanner", "batch", "image_seq", "mode", "precinct",
              "contest", "selection", "write_in_text")
ABBS_HEADER = ("source_page", "location_or_scanner", "batch_label", "mode",
               "trump", "biden", "jorgensen", "write_in", "undervote_blank", "overvote")
AUDIT_HEADER = ("county", "batch_name", "trump", "biden", "jorgensen")
MANIFEST_HEADER = ("container_id", "location", "num_cards")
POLLBOOK_HEADER = ("precinct", "mode", "num_participants")
RESULTS_HEADER = ("phase", "precinct", "mode", "candidate", "votes")
CLAIMED_HEADER = ("group_id", "image_ref")

PHASES = ("original", "recount", "audit")

# selection tokens in cvr.csv
WRITE_IN = "WRITE-IN"
OVERVOTE = "OVERVOTE"
UNDERVOTE = ""

TALLY_FIELDS = ("trump", "biden", "jorgensen", "write_in", "undervote_blank", "overvote")
CANDIDATE_FIELDS = ("trump", "biden", "jorgensen")


class ParseError(ValueError):
    """A record file could not be read.  ``line`` is 1-based (header = 1)."""

    def __init__(self, message: str, line: Optional[int] = None,
                 column: Optional[str] = None, source: Optional[str] = None):
        self.message = message
        self.line = line
        self.column = column
        self.source = source
        where = []
        if source:
            where.append(str(source))
        if line is not None:
            where.append(f"line {line}")
        if column:
            where.append(f"column {column!r}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)


class SchemaError(ParseError):
    """Header mismatch or a constraint spanning several rows was violated."""


class ValidationError(ParseError):
    """A cell parsed but holds an out-of-range value."""


class VotingMode(enum.Enum):
    ELECTION_DAY = "election_day"
    ADVANCE = "advance"
    ABSENTEE_BY_MAIL = "absentee_by_mail"
    PROVISIONAL = "provisional"
    UNKNOWN = "unknown"

    @classmethod
    def parse(cls, text: str) -> "VotingMode":
        key = " ".join(text.strip().casefold().replace("_", " ").replace("-", " ").split())
        try:
            return _MODE_ALIASES[key]
        except KeyError:
            raise ValueError(f"unrecognized voting mode {text!r}") from None

    def __str__(self) -> str:
        return self.value


_MODE_ALIASES = {
    "": VotingMode.UNKNOWN,
    "?": VotingMode.UNKNOWN,
    "unknown": VotingMode.UNKNOWN,
    "election day": VotingMode.ELECTION_DAY,
    "advance": VotingMode.ADVANCE,
    "advance in person": VotingMode.ADVANCE,
    "absentee": VotingMode.ABSENTEE_BY_MAIL,
    "absentee by mail": VotingMode.ABSENTEE_BY_MAIL,
    "provisional": VotingMode.PROVISIONAL,
}

MODE_ORDER = {mode: i for i, mode in enumerate(VotingMode)}

_IMAGE_RE = re.compile(r"^(\d{5})_(\d{5})_(\d{6})$")


class ImageRef(NamedTuple):
    """Scanner/batch/image triple identifying one scanned sheet.

    Tuple ordering gives the canonical total order.
    """

    scanner_id: int
    batch_id: int
    image_seq: int

    @classmethod
    def parse(cls, text: str) -> "ImageRef":
        m = _IMAGE_RE.match(text.strip())
        if m is None:
            raise ValueError(f"malformed image reference {text!r}; expected SSSSS_BBBBB_IIIIII")
        return cls(int(m.group(1)), int(m.group(2)), int(m.group(3)))

    @classmethod
    def of(cls, scanner_id: int, batch_id: int, image_seq: int) -> "ImageRef":
        for name, value, width in (("scanner_id", scanner_id, 5), ("batch_id", batch_id, 5),
                                   ("image_seq", image_seq, 6)):
            if not 0 <= value < 10 ** width:
                raise ValueError(f"{name}={value} does not fit {width} digits")
        return cls(scanner_id, batch_id, image_seq)

    @property
    def batch(self) -> tuple[int, int]:
        return (self.scanner_id, self.batch_id)

    def __str__(self) -> str:
        return f"{self.scanner_id:05d}_{self.batch_id:05d}_{self.image_seq:06d}"


@dataclass(frozen=True)
class TallyVector:
    """Presidential-contest counts for one batch; ``None`` means unknown."""

    trump: Optional[int] = None
    biden: Optional[int] = None
    jorgensen: Optional[int] = None
    write_in: Optional[int] = None
    undervote_blank: Optional[int] = None
    overvote: Optional[int] = None

    def __post_init__(self):
        for name in TALLY_FIELDS:
            value = getattr(self, name)
            if value is not None and value < 0:
                raise ValueError(f"{name} must be non-negative, got {value}")

    @property
    def candidates(self) -> tuple[Optional[int], Optional[int], Optional[int]]:
        return (self.trump, self.biden, self.jorgensen)

    @property
    def unknown_fields(self) -> frozenset[str]:
        return frozenset(n for n in TALLY_FIELDS if getattr(self, n) is None)

    @property
    def candidate_total(self) -> int:
        """Sum of the known trump/biden/jorgensen/write-in entries."""
        return sum(v for v in (self.trump, self.biden, self.jorgensen, self.write_in) if v is not None)


@dataclass(frozen=True)
class TallySum:
    """Field-wise sum over tally vectors.

    ``totals`` holds sums of the known entries only; ``unknown`` names every
    field for which at least one summand was unknown, so those totals are
    partial.
    """

    totals: Mapping[str, int]
    unknown: frozenset[str] = frozenset()

    def value(self, name: str) -> Optional[int]:
        return None if name in self.unknown else self.totals[name]

    @property
    def is_partial(self) -> bool:
        return bool(self.unknown)


def sum_tallies(vectors: Iterable[TallyVector]) -> TallySum:
    totals = dict.fromkeys(TALLY_FIELDS, 0)
    unknown = set()
    for vec in vectors:
        for name in TALLY_FIELDS:
            value = getattr(vec, name)
            if value is None:
                unknown.add(name)
            else:
                totals[name] += value
    return TallySum(totals, frozenset(unknown))


@dataclass(frozen=True)
class BatchSheet:
    """One hand-filled audit board batch sheet."""

    source_page: str
    location_or_scanner: str
    batch_label: str
    mode: VotingMode
    tally: TallyVector

    def __post_init__(self):
        if not self.batch_label.strip():
            raise ValueError("batch_label must be non-empty")


@dataclass(frozen=True)
class AuditRow:
    county: str
    batch_name: str
    trump: int
    biden: int
    jorgensen: int

    def __post_init__(self):
        for name in CANDIDATE_FIELDS:
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    @property
    def tally(self) -> tuple[int, int, int]:
        return (self.trump, self.biden, self.jorgensen)


@dataclass(frozen=True, slots=True)
class CastVoteRecord:
    """Machine interpretation of one scanned sheet.

    ``selections`` maps contest id to the selected candidate id, ``""`` for
    an undervote, :data:`WRITE_IN` or :data:`OVERVOTE`.  ``write_ins`` holds
    free text for contests where some was captured.  Treat both mappings as
    read-only.
    """

    cvr_id: str
    image: ImageRef
    mode: VotingMode
    precinct: str
    selections: Mapping[str, str] = field(default_factory=dict)
    write_ins: Mapping[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class ManifestEntry:
    container_id: str
    location: str
    num_cards: int


@dataclass(frozen=True)
class Manifest:
    entries: tuple[ManifestEntry, ...] = ()

    def __post_init__(self):
        seen = set()
        for entry in self.entries:
            if entry.container_id in seen:
                raise ValueError(f"duplicate container_id {entry.container_id!r}")
            if entry.num_cards < 0:
                raise ValueError("num_cards must be non-negative")
            seen.add(entry.container_id)

    @property
    def total_cards(self) -> int:
        return sum(e.num_cards for e in self.entries)


@dataclass(frozen=True)
class PollbookSummary:
    precinct: str
    mode: VotingMode
    num_participants: int


@dataclass(frozen=True)
class PrecinctModeTally:
    phase: str
    precinct: str
    mode: VotingMode
    candidate: str
    votes: int


# ---------------------------------------------------------------- io helpers

@contextmanager
def _opened(source: Source, mode: str = "r") -> Iterator[tuple[IO[str], Optional[str]]]:
    if isinstance(source, (str, os.PathLike)):
        with open(source, mode, newline="", encoding="utf-8") as fh:
            yield fh, os.fspath(source)
    else:
        yield source, getattr(source, "name", None)


def _rows(source: Source, header: Sequence[str]) -> Iterator[tuple[int, list[str], Optional[str]]]:
    """Yield ``(line_no, cells, source_name)`` after checking the header."""
    with _opened(source) as (fh, name):
        reader = csv.reader(fh)
        try:
            first = next(reader)
        except StopIteration:
            raise SchemaError("empty file; header row required", 1, source=name) from None
        if first and first[0].startswith("﻿"):
            first[0] = first[0][1:]
        if tuple(c.strip() for c in first) != tuple(header):
            raise SchemaError(f"expected header {','.join(header)!r}, got {','.join(first)!r}",
                              1, source=name)
        width = len(header)
        for cells in reader:
            line = reader.line_num
            if not cells or (len(cells) == 1 and not cells[0].strip()):
                continue
            if len(cells) != width:
                raise SchemaError(f"expected {width} cells, got {len(cells)}", line, source=name)
            yield line, cells, name


def _int(text: str, line: int, column: str, name: Optional[str]) -> int:
    try:
        value = int(text.strip())
    except ValueError:
        raise ParseError(f"not an integer: {text!r}", line, column, name) from None
    if value < 0:
        raise ValidationError(f"negative count {value}", line, column, name)
    return value


def _opt_int(text: str, line: int, column: str, name: Optional[str]) -> Optional[int]:
    if text.strip() in ("", "?"):
        return None
    return _int(text, line, column, name)


def _mode(text: str, line: int, column: str, name: Optional[str]) -> VotingMode:
    try:
        return VotingMode.parse(text)
    except ValueError as exc:
        raise ParseError(str(exc), line, column, name) from None


def _image(scanner: str, batch: str, seq: str, line: int, name: Optional[str]) -> ImageRef:
    parts = []
    for col, raw, width in (("scanner", scanner, 5), ("batch", batch, 5), ("image_seq", seq, 6)):
        raw = raw.strip()
        if not raw.isdigit() or int(raw) >= 10 ** width:
            raise ParseError(f"malformed image reference component {raw!r} "
                             f"(expected at most {width} digits)", line, col, name)
        parts.append(int(raw))
    return ImageRef(*parts)


def _writer(stream: IO[str], header: Sequence[str]):
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(header)
    return w


@contextmanager
def _sink(target: Source) -> Iterator[IO[str]]:
    if isinstance(target, (str, os.PathLike)):
        with open(target, "w", newline="", encoding="utf-8") as fh:
            yield fh
    else:
        yield target


def _cell(value: Optional[int]) -> str:
    return "" if value is None else str(value)


# ---------------------------------------------------------------------- CVRs

def parse_cvr_export(source: Source) -> list[CastVoteRecord]:
    """Read a long-format CVR export (one row per contest per CVR).

    Records come back in order of first appearance of their ``cvr_id``.
    """
    builders: dict[str, tuple[ImageRef, VotingMode, str, dict, dict, int]] = {}
    for line, cells, name in _rows(source, CVR_HEADER):
        cvr_id, scanner, batch, seq, mode, precinct, contest, selection, text = cells
        if not cvr_id:
            raise ParseError("empty cvr_id", line, "cvr_id", name)
        image = _image(scanner, batch, seq, line, name)
        entry = builders.get(cvr_id)
        if entry is None:
            entry = (image, _mode(mode, line, "mode", name), precinct, {}, {}, line)
            builders[cvr_id] = entry
        else:
            if entry[0] != image:
                raise SchemaError(f"cvr {cvr_id!r} has conflicting image references "
                                  f"({entry[0]} on line {entry[5]})", line, "scanner", name)
            if entry[2] != precinct or entry[1] is not _mode(mode, line, "mode", name):
                raise SchemaError(f"cvr {cvr_id!r} has conflicting mode/precinct",
                                  line, "precinct", name)
        if not contest:
            raise ParseError("empty contest", line, "contest", name)
        if contest in entry[3]:
            raise SchemaError(f"duplicate (cvr_id, contest) pair ({cvr_id!r}, {contest!r})",
                              line, "contest", name)
        entry[3][contest] = selection
        if text:
            entry[4][contest] = text
    return [CastVoteRecord(cvr_id, e[0], e[1], e[2], e[3], e[4]) for cvr_id, e in builders.items()]


def serialize_cvr_export(records: Iterable[CastVoteRecord], target: Source) -> None:
    with _sink(target) as fh:
        w = _writer(fh, CVR_HEADER)
        for r in records:
            if not r.selections:
                raise ValueError(f"cvr {r.cvr_id!r} has no contests and cannot be written in long format")
            img = r.image
            for contest, selection in r.selections.items():
                w.writerow((r.cvr_id, img.scanner_id, img.batch_id, img.image_seq, r.mode.value,
                            r.precinct, contest, selection, r.write_ins.get(contest, "")))


# ---------------------------------------------------------- audit batch sheets

def parse_batch_sheets(source: Source) -> list[BatchSheet]:
    sheets = []
    for line, cells, name in _rows(source, ABBS_HEADER):
        page, loc, label, mode = cells[:4]
        if not label.strip():
            raise ValidationError("batch_label must be non-empty", line, "batch_label", name)
        counts = [_opt_int(cells[4 + i], line, col, name) for i, col in enumerate(TALLY_FIELDS)]
        sheets.append(BatchSheet(page, loc, label, _mode(mode, line, "mode", name), TallyVector(*counts)))
    return sheets


def serialize_batch_sheets(sheets: Iterable[BatchSheet], target: Source) -> None:
    with _sink(target) as fh:
        w = _writer(fh, ABBS_HEADER)
        for s in sheets:
            w.writerow([s.source_page, s.location_or_scanner, s.batch_label, s.mode.value]
                       + [_cell(getattr(s.tally, n)) for n in TALLY_FIELDS])


def parse_audit_spreadsheet(source: Source) -> list[AuditRow]:
    rows = []
    for line, cells, name in _rows(source, AUDIT_HEADER):
        county, batch_name = cells[:2]
        counts = [_int(cells[2 + i], line, col, name) for i, col in enumerate(CANDIDATE_FIELDS)]
        rows.append(AuditRow(county, batch_name, *counts))
    return rows


def serialize_audit_spreadsheet(rows: Iterable[AuditRow], target: Source) -> None:
    with _sink(target) as fh:
        w = _writer(fh, AUDIT_HEADER)
        for r in rows:
            w.writerow((r.county, r.batch_name, r.trump, r.biden, r.jorgensen))


def parse_manifest(source: Source) -> Manifest:
    entries = []
    seen: dict[str, int] = {}
    for line, (cid, loc, n), name in _rows(source, MANIFEST_HEADER):
        if not cid:
            raise ParseError("empty container_id", line, "container_id", name)
        if cid in seen:
            raise SchemaError(f"duplicate container_id {cid!r} (first on line {seen[cid]})",
                              line, "container_id", name)
        seen[cid] = line
        entries.append(ManifestEntry(cid, loc, _int(n, line, "num_cards", name)))
    return Manifest(tuple(entries))


def serialize_manifest(manifest: Manifest, target: Source) -> None:
    with _sink(target) as fh:
        w = _writer(fh, MANIFEST_HEADER)
        for e in manifest.entries:
            w.writerow((e.container_id, e.location, e.num_cards))


def parse_pollbook(source: Source) -> list[PollbookSummary]:
    out = []
    seen: dict[tuple[str, VotingMode], int] = {}
    for line, (precinct, mode, n), name in _rows(source, POLLBOOK_HEADER):
        key = (precinct, _mode(mode, line, "mode", name))
        if key in seen:
            raise SchemaError(f"duplicate (precinct, mode) {precinct!r}/{key[1].value}",
                              line, "mode", name)
        seen[key] = line
        out.append(PollbookSummary(precinct, key[1], _int(n, line, "num_participants", name)))
    return out


def serialize_pollbook(entries: Iterable[PollbookSummary], target: Source) -> None:
    with _sink(target) as fh:
        w = _writer(fh, POLLBOOK_HEADER)
        for p in entries:
            w.writerow((p.precinct, p.mode.value, p.num_participants))


def parse_precinct_results(source: Source) -> list[PrecinctModeTally]:
    out = []
    seen: dict[tuple, int] = {}
    for line, (phase, precinct, mode, candidate, votes), name in _rows(source, RESULTS_HEADER):
        if phase not in PHASES:
            raise ParseError(f"unknown phase {phase!r}; expected one of {', '.join(PHASES)}",
                             line, "phase", name)
        m = _mode(mode, line, "mode", name)
        key = (phase, precinct, m, candidate)
        if key in seen:
            raise SchemaError(f"duplicate (phase, precinct, mode, candidate) "
                              f"(first on line {seen[key]})", line, "candidate", name)
        seen[key] = line
        out.append(PrecinctModeTally(phase, precinct, m, candidate, _int(votes, line, "votes", name)))
    return out


def serialize_precinct_results(results: Iterable[PrecinctModeTally], target: Source) -> None:
    with _sink(target) as fh:
        w = _writer(fh, RESULTS_HEADER)
        for r in results:
            w.writerow((r.phase, r.precinct, r.mode.value, r.candidate, r.votes))


def parse_image_inventory(source: Source) -> list[ImageRef]:
    """Read ``images.txt``: one canonical image reference per line."""
    out = []
    with _opened(source) as (fh, name):
        for line_no, raw in enumerate(fh, start=1):
            text = raw.strip()
            if not text:
                continue
            try:
                out.append(ImageRef.parse(text))
            except ValueError as exc:
                raise ParseError(str(exc), line_no, "image_ref", name) from None
    return out


def serialize_image_inventory(refs: Iterable[ImageRef], target: Source) -> None:
    with _sink(target) as fh:
        fh.writelines(f"{r}\n" for r in refs)


def parse_claimed_groups(source: Source) -> dict[str, list[ImageRef]]:
    """Read ``claimed-groups.csv`` into ``group_id -> members`` (file order)."""
    groups: dict[str, list[ImageRef]] = {}
    for line, (gid, ref), name in _rows(source, CLAIMED_HEADER):
        if not gid:
            raise ParseError("empty group_id", line, "group_id", name)
        try:
            groups.setdefault(gid, []).append(ImageRef.parse(ref))
        except ValueError as exc:
            raise ParseError(str(exc), line, "image_ref", name) from None
    return groups


def serialize_claimed_groups(groups: Mapping[str, Sequence[ImageRef]], target: Source) -> None:
    with _sink(target) as fh:
        w = _writer(fh, CLAIMED_HEADER)
        for gid, members in groups.items():
            for ref in members:
                w.writerow((gid, str(ref)))


def to_text(writer, *args) -> str:
    """Run a ``serialize_*`` function into a string (handy in tests and reports)."""
    buf = io.StringIO()
    writer(*args, buf)
    return buf.getvalue()
