"""Ballot accounting and cross-phase tally checks."""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Optional, Sequence

from .dup_forensics import DuplicateGroup, _UnionFind, vote_signature
from .records import (MODE_ORDER, PHASES, UNDERVOTE, CastVoteRecord, ImageRef, Manifest,
                      PollbookSummary, PrecinctModeTally, VotingMode)

UNDERVOTE_KEY = "UNDERVOTE"


@dataclass
class AccountingLedger:
    cvr_count_by_phase: dict[str, int] = field(default_factory=dict)
    image_count_by_phase: dict[str, int] = field(default_factory=dict)
    manifest_total: Optional[int] = None
    pollbook_total: Optional[int] = None
    missing_image_refs: dict[str, list[ImageRef]] = field(default_factory=dict)
    missing_batches: dict[str, list[tuple[int, int]]] = field(default_factory=dict)
    unreferenced_images: dict[str, int] = field(default_factory=dict)
    reported_missing_images: dict[str, int] = field(default_factory=dict)

    def findings(self) -> list[dict]:
        """Every failed check, derived from the ledger fields alone."""
        out = []
        for phase in self.cvr_count_by_phase:
            counts = {"cvrs": self.cvr_count_by_phase[phase]}
            if phase in self.image_count_by_phase:
                counts["images"] = self.image_count_by_phase[phase]
            if self.manifest_total is not None:
                counts["manifest"] = self.manifest_total
            if self.pollbook_total is not None:
                counts["pollbook"] = self.pollbook_total
            for a, b in combinations(counts, 2):
                if counts[a] != counts[b]:
                    out.append({
                        "kind": "count_mismatch", "phase": phase, "left": a, "right": b,
                        "left_count": counts[a], "right_count": counts[b],
                        "difference": counts[a] - counts[b],
                        "message": f"{phase}: {a} count {counts[a]:,} != {b} count {counts[b]:,} "
                                   f"(difference {counts[a] - counts[b]:,})",
                    })
            missing = self.missing_image_refs.get(phase, [])
            if missing:
                out.append({
                    "kind": "missing_images", "phase": phase, "count": len(missing),
                    "message": f"{phase}: {len(missing):,} image files referenced by CVRs are missing",
                })
            for scanner, batch in self.missing_batches.get(phase, []):
                out.append({
                    "kind": "missing_batch", "phase": phase, "scanner": scanner, "batch": batch,
                    "message": f"{phase}: no images at all for scanner {scanner} batch {batch}, "
                               f"which CVRs reference",
                })
            extra = self.unreferenced_images.get(phase, 0)
            if extra:
                out.append({
                    "kind": "unreferenced_images", "phase": phase, "count": extra,
                    "message": f"{phase}: {extra:,} images match no CVR",
                })
            if phase in self.reported_missing_images:
                stated = self.reported_missing_images[phase]
                derived = len(missing)
                alt = self.cvr_count_by_phase[phase] - self.image_count_by_phase.get(phase, 0)
                if stated != derived:
                    out.append({
                        "kind": "reported_missing_disagrees", "phase": phase,
                        "reported": stated, "derived": derived, "cvrs_minus_images": alt,
                        "message": f"{phase}: reported {stated:,} missing images but the records "
                                   f"give {derived:,} ({self.cvr_count_by_phase[phase]:,} CVRs "
                                   f"minus {self.image_count_by_phase.get(phase, 0):,} images = {alt:,})",
                    })
        for a, b in combinations(list(self.cvr_count_by_phase), 2):
            ca, cb = self.cvr_count_by_phase[a], self.cvr_count_by_phase[b]
            if ca != cb:
                out.append({
                    "kind": "cvr_count_phase_delta", "left": a, "right": b,
                    "left_count": ca, "right_count": cb, "difference": ca - cb,
                    "message": f"CVR count differs between {a} ({ca:,}) and {b} ({cb:,}): {ca - cb:,}",
                })
        return out

    def as_dict(self, max_refs: int = 50) -> dict:
        return {
            "cvr_count_by_phase": dict(self.cvr_count_by_phase),
            "image_count_by_phase": dict(self.image_count_by_phase),
            "manifest_total": self.manifest_total,
            "pollbook_total": self.pollbook_total,
            "missing_image_count": {p: len(v) for p, v in self.missing_image_refs.items()},
            "missing_image_refs_sample": {p: [str(r) for r in v[:max_refs]]
                                          for p, v in self.missing_image_refs.items()},
            "missing_batches": {p: [list(b) for b in v] for p, v in self.missing_batches.items()},
            "unreferenced_images": dict(self.unreferenced_images),
            "reported_missing_images": dict(self.reported_missing_images),
        }


def count_reconciliation(cvrs_by_phase: Mapping[str, Sequence[CastVoteRecord]],
                         images_by_phase: Mapping[str, Iterable[ImageRef]],
                         manifest: Optional[Manifest] = None,
                         pollbook: Optional[Sequence[PollbookSummary]] = None,
                         reported_missing_images: Optional[Mapping[str, int]] = None
                         ) -> AccountingLedger:
    """Compare CVR, image, manifest and pollbook counts.

    Manifest and pollbook describe the one physical election, so both are
    compared with every phase's electronic counts.  Either may be ``None``
    when no such record exists; the corresponding checks are then skipped.
    """
    ledger = AccountingLedger()
    ledger.manifest_total = manifest.total_cards if manifest is not None else None
    ledger.pollbook_total = sum(p.num_participants for p in pollbook) if pollbook is not None else None
    ledger.reported_missing_images = dict(reported_missing_images or {})
    for phase, cvrs in cvrs_by_phase.items():
        ledger.cvr_count_by_phase[phase] = len(cvrs)
        if phase not in images_by_phase:
            continue
        present = set(images_by_phase[phase])
        ledger.image_count_by_phase[phase] = len(present)
        referenced = {c.image for c in cvrs}
        ledger.missing_image_refs[phase] = sorted(referenced - present)
        present_batches = {r.batch for r in present}
        ledger.missing_batches[phase] = sorted({r.batch for r in referenced} - present_batches)
        ledger.unreferenced_images[phase] = len(present - referenced)
    return ledger


@dataclass(frozen=True)
class PhaseDelta:
    precinct: str
    mode: VotingMode
    candidate: str
    values: Mapping[str, int]
    missing_phases: tuple[str, ...] = ()

    def delta(self, a: str, b: str) -> int:
        return self.values[a] - self.values[b]

    @property
    def differences(self) -> dict[tuple[str, str], int]:
        return {(a, b): self.delta(a, b) for a in self.values for b in self.values if a != b}

    def relative_to_original(self, phase: str) -> Optional[Fraction]:
        """``(phase - original) / original``; ``None`` when undefined."""
        base = self.values.get("original")
        if not base or phase not in self.values:
            return None
        return Fraction(self.values[phase] - base, base)

    def as_dict(self) -> dict:
        diffs = {f"{a}-{b}": v for (a, b), v in self.differences.items() if _phase_rank(a) > _phase_rank(b)}
        rel = {}
        for p in self.values:
            r = self.relative_to_original(p)
            if p != "original" and r is not None:
                rel[p] = round(float(r) * 100, 4)
        return {
            "precinct": self.precinct, "mode": self.mode.value, "candidate": self.candidate,
            "values": dict(self.values), "differences": diffs,
            "relative_to_original_percent": rel, "missing_phases": list(self.missing_phases),
        }


def _phase_rank(phase: str) -> int:
    return PHASES.index(phase) if phase in PHASES else len(PHASES)


def phase_compare(results: Iterable[PrecinctModeTally]) -> list[PhaseDelta]:
    """One delta per (precinct, mode, candidate) reported by two or more phases.

    Absent cells stay absent (listed in ``missing_phases``), never zero.
    """
    cells: dict[tuple, dict[str, int]] = defaultdict(dict)
    phases_seen = set()
    for r in results:
        cells[(r.precinct, r.mode, r.candidate)][r.phase] = r.votes
        phases_seen.add(r.phase)
    phase_order = sorted(phases_seen, key=lambda p: (_phase_rank(p), p))
    out = []
    for (precinct, mode, cand), vals in cells.items():
        if len(vals) < 2:
            continue
        ordered = {p: vals[p] for p in phase_order if p in vals}
        missing = tuple(p for p in phase_order if p not in vals)
        out.append(PhaseDelta(precinct, mode, cand, ordered, missing))
    out.sort(key=lambda d: (d.precinct, MODE_ORDER[d.mode], d.candidate))
    return out


def tally_cvrs(cvrs: Iterable[CastVoteRecord], contest: str) -> Counter:
    """Count selections in ``contest`` over every CVR, duplicates included.

    Undervotes are counted under ``"UNDERVOTE"``; CVRs without the contest
    are skipped.
    """
    counts: Counter = Counter()
    for cvr in cvrs:
        sel = cvr.selections.get(contest)
        if sel is None:
            continue
        counts[UNDERVOTE_KEY if sel == UNDERVOTE else sel] += 1
    return counts


@dataclass
class DedupTally:
    adjusted: Counter
    removed: Counter
    rejected: list[tuple[DuplicateGroup, str]] = field(default_factory=list)


def dedup_adjusted_tally(cvrs: Sequence[CastVoteRecord], groups: Iterable[DuplicateGroup],
                         contest: str) -> DedupTally:
    """Tally ``contest`` counting each duplicate group as one sheet.

    Groups whose members are missing from ``cvrs`` or disagree on votes are
    rejected and reported.  Overlapping groups are merged before counting.
    """
    by_ref: dict[ImageRef, list[int]] = defaultdict(list)
    for n, cvr in enumerate(cvrs):
        by_ref[cvr.image].append(n)
    uf = _UnionFind()
    rejected = []
    for g in groups:
        idx = [n for ref in g.members for n in by_ref.get(ref, ())]
        if any(ref not in by_ref for ref in g.members):
            rejected.append((g, "missing_reference"))
            continue
        if len({vote_signature(cvrs[n]) for n in idx}) != 1:
            rejected.append((g, "conflicting_signatures"))
            continue
        for n in idx[1:]:
            uf.union(idx[0], n)
    drop = set()
    for members in uf.components().values():
        drop.update(sorted(members)[1:])
    full = tally_cvrs(cvrs, contest)
    removed = tally_cvrs((cvrs[n] for n in sorted(drop)), contest)
    adjusted = Counter({k: full[k] - removed[k] for k in full})
    return DedupTally(adjusted, removed, rejected)
