"""Find sheets that were tabulated more than once.

Two kinds of evidence are handled.  Claimed groups of image references
(found by someone looking at scans) are checked against the CVRs.  Without
claims, scan batches are compared to each other: when one stack of paper is
fed through a scanner twice, the two batches show the same vote sequence,
possibly back to front.  Long exact runs of equal vote signatures are
found with a seed-and-extend search over hashed windows.
"""

from __future__ import annotations

import math
import random
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Optional, Sequence, Union

import numpy as np

from .records import CastVoteRecord, ImageRef

DEFAULT_MIN_RUN = 10
DEFAULT_RARE_THRESHOLD = 5

SAME = "same"
REVERSED = "reversed"

VoteSignature = tuple  # tuple of (contest, selection, write_in_text), sorted by contest
BatchKey = tuple  # (scanner_id, batch_id)


def vote_signature(cvr: CastVoteRecord) -> VoteSignature:
    return tuple(sorted((c, s, cvr.write_ins.get(c, "")) for c, s in cvr.selections.items()))


class BatchSequence(NamedTuple):
    refs: tuple[ImageRef, ...]
    signatures: tuple[VoteSignature, ...]


def batch_sequences(cvrs: Iterable[CastVoteRecord]) -> dict[BatchKey, BatchSequence]:
    """Group CVRs by scan batch, each batch ordered by image sequence number."""
    by_batch: dict[BatchKey, list[tuple[int, int, CastVoteRecord]]] = defaultdict(list)
    for n, cvr in enumerate(cvrs):
        by_batch[cvr.image.batch].append((cvr.image.image_seq, n, cvr))
    out = {}
    for key in sorted(by_batch):
        items = sorted(by_batch[key], key=lambda t: (t[0], t[1]))
        out[key] = BatchSequence(tuple(c.image for _, _, c in items),
                                 tuple(vote_signature(c) for _, _, c in items))
    return out


@dataclass(frozen=True, order=True)
class SequenceRun:
    """A maximal stretch where two batches agree position by position.

    Indices are 0-based positions within each batch's ordered sequence.
    For ``same`` orientation position ``start_a + t`` pairs with
    ``start_b + t``; for ``reversed`` it pairs with
    ``start_b + length - 1 - t``.  ``batch_a < batch_b`` always.
    """

    batch_a: BatchKey
    batch_b: BatchKey
    start_a: int
    start_b: int
    length: int
    orientation: str

    def pairs(self) -> list[tuple[int, int]]:
        if self.orientation == SAME:
            return [(self.start_a + t, self.start_b + t) for t in range(self.length)]
        last = self.start_b + self.length - 1
        return [(self.start_a + t, last - t) for t in range(self.length)]


def _window_hashes(flat: np.ndarray, width: int) -> np.ndarray:
    n = len(flat) - width + 1
    if n <= 0:
        return np.zeros(0, dtype=np.uint64)
    base = np.uint64(1_000_003)
    vals = flat.astype(np.uint64) + np.uint64(1)
    h = np.zeros(n, dtype=np.uint64)
    for t in range(width):
        h = h * base + vals[t:t + n]
    return h


def find_aligned_runs(sequences: Mapping[BatchKey, BatchSequence], min_run: int = DEFAULT_MIN_RUN
                      ) -> list[SequenceRun]:
    """Every maximal exact run of length >= ``min_run`` between two distinct
    batches, in either orientation, sorted canonically."""
    if min_run < 2:
        raise ValueError("min_run must be at least 2")
    keys = sorted(sequences)
    ids: dict = {}
    arrays = [np.fromiter((ids.setdefault(s, len(ids)) for s in sequences[k].signatures),
                          dtype=np.int64, count=len(sequences[k].signatures)) for k in keys]
    lists = [a.tolist() for a in arrays]

    # forward windows of every batch, then windows of every batch read backwards
    hashes, owner, pos, kind = [], [], [], []
    for direction in (0, 1):
        for b, arr in enumerate(arrays):
            if len(arr) < min_run:
                continue
            src = arr if direction == 0 else arr[::-1]
            h = _window_hashes(src, min_run)
            hashes.append(h)
            owner.append(np.full(len(h), b, dtype=np.int64))
            pos.append(np.arange(len(h), dtype=np.int64))
            kind.append(np.full(len(h), direction, dtype=np.int8))
    if not hashes:
        return []
    H = np.concatenate(hashes)
    O = np.concatenate(owner)
    P = np.concatenate(pos)
    K = np.concatenate(kind)
    order = np.argsort(H, kind="stable")
    Hs = H[order]
    boundaries = np.flatnonzero(np.diff(Hs) != 0) + 1
    starts = np.concatenate(([0], boundaries))
    ends = np.concatenate((boundaries, [len(Hs)]))
    multi = (ends - starts) > 1

    found: set[SequenceRun] = set()
    for s, e in zip(starts[multi], ends[multi]):
        members = order[s:e]
        fwd = [(int(O[m]), int(P[m])) for m in members if K[m] == 0]
        rev = [(int(O[m]), int(P[m])) for m in members if K[m] == 1]
        if not fwd:
            continue
        for x, (ba, i) in enumerate(fwd):
            A = lists[ba]
            for bb, j in fwd[x + 1:]:
                if bb == ba:
                    continue
                a_, i_, b_, j_ = (ba, i, bb, j) if ba < bb else (bb, j, ba, i)
                run = _extend_same(lists[a_], lists[b_], i_, j_, min_run)
                if run:
                    found.add(SequenceRun(keys[a_], keys[b_], i_, j_, run, SAME))
            for bb, p in rev:
                if bb == ba:
                    continue
                B = lists[bb]
                q = len(B) - 1 - p
                run = _extend_reversed(A, B, i, q, min_run)
                if run:
                    lo = q - run + 1
                    if ba < bb:
                        found.add(SequenceRun(keys[ba], keys[bb], i, lo, run, REVERSED))
                    else:
                        found.add(SequenceRun(keys[bb], keys[ba], lo, i, run, REVERSED))
    return sorted(found)


def _extend_same(A: list, B: list, i: int, j: int, min_run: int) -> int:
    if i > 0 and j > 0 and A[i - 1] == B[j - 1]:
        return 0  # not the start of its run
    n = 0
    while i + n < len(A) and j + n < len(B) and A[i + n] == B[j + n]:
        n += 1
    return n if n >= min_run else 0


def _extend_reversed(A: list, B: list, i: int, q: int, min_run: int) -> int:
    if i > 0 and q + 1 < len(B) and A[i - 1] == B[q + 1]:
        return 0
    n = 0
    while i + n < len(A) and q - n >= 0 and A[i + n] == B[q - n]:
        n += 1
    return n if n >= min_run else 0


@dataclass(frozen=True)
class DuplicateGroup:
    """Image references believed to be scans of one piece of paper."""

    members: tuple[ImageRef, ...]
    evidence: str  # "sequence_run" or "explicit_pairing"
    run_length: Optional[int] = None
    orientation: Optional[str] = None
    rare_write_in_hits: int = 0
    multiplicity: Optional[int] = None

    def as_dict(self) -> dict:
        return {
            "members": [str(m) for m in self.members],
            "evidence": self.evidence,
            "run_length": self.run_length,
            "orientation": self.orientation,
            "rare_write_in_hits": self.rare_write_in_hits,
            "multiplicity": self.multiplicity,
        }


class _UnionFind:
    def __init__(self):
        self.parent: dict = {}

    def find(self, x):
        parent = self.parent
        parent.setdefault(x, x)
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra

    def components(self) -> dict:
        comps: dict = defaultdict(list)
        for x in list(self.parent):
            comps[self.find(x)].append(x)
        return comps


def rare_write_in_texts(sequences: Mapping[BatchKey, BatchSequence],
                        threshold: int = DEFAULT_RARE_THRESHOLD) -> set[str]:
    counts: Counter = Counter()
    for seq in sequences.values():
        for sig in seq.signatures:
            counts.update(text for _, _, text in sig if text)
    return {t for t, c in counts.items() if c <= threshold}


def detect_sequence_runs(sequences: Mapping[BatchKey, BatchSequence],
                         min_run: int = DEFAULT_MIN_RUN,
                         rare_threshold: int = DEFAULT_RARE_THRESHOLD,
                         runs: Optional[Sequence[SequenceRun]] = None) -> list[DuplicateGroup]:
    """Turn aligned runs into duplicate groups.

    Aligned positions are merged transitively, so a sheet scanned three times
    yields one group of three.  A merged set becomes a group only when its
    vote signature occurs nowhere else in the data: a common signature sitting
    inside a run is not, by itself, proof that one piece of paper was scanned
    twice.  Each group carries the length, orientation and rare write-in count
    of the longest run it came from.
    """
    if runs is None:
        runs = find_aligned_runs(sequences, min_run)
    multiplicity: Counter = Counter()
    for seq in sequences.values():
        multiplicity.update(seq.signatures)
    rare = rare_write_in_texts(sequences, rare_threshold)

    uf = _UnionFind()
    best_run: dict = {}
    for run in runs:
        sa = sequences[run.batch_a]
        pairs = run.pairs()
        hits = sum(1 for i, _ in pairs if any(t in rare for _, _, t in sa.signatures[i]))
        for i, j in pairs:
            na, nb = (run.batch_a, i), (run.batch_b, j)
            uf.union(na, nb)
            for node in (na, nb):
                prev = best_run.get(node)
                if prev is None or run.length > prev[0].length:
                    best_run[node] = (run, hits)

    groups = []
    for nodes in uf.components().values():
        batch, i = nodes[0]
        sig = sequences[batch].signatures[i]
        if multiplicity[sig] != len(nodes):
            continue
        run, hits = min((best_run[n] for n in nodes), key=lambda rh: (-rh[0].length, rh[0]))
        members = tuple(sorted(sequences[b].refs[p] for b, p in nodes))
        groups.append(DuplicateGroup(members, "sequence_run", run.length, run.orientation,
                                     hits, multiplicity[sig]))
    groups.sort(key=lambda g: g.members)
    return groups


@dataclass(frozen=True)
class GroupFailure:
    group_id: str
    reason: str  # "too_small", "missing_reference" or "signature_mismatch"
    refs: tuple[ImageRef, ...] = ()


@dataclass
class ExplicitVerification:
    verified: list[tuple[str, DuplicateGroup]] = field(default_factory=list)
    failures: list[GroupFailure] = field(default_factory=list)
    referenced: int = 0  # distinct claimed refs found among the CVRs

    @property
    def groups(self) -> list[DuplicateGroup]:
        return [g for _, g in self.verified]


def detect_explicit_multiples(claimed: Union[Mapping[str, Sequence[ImageRef]], Sequence[Sequence[ImageRef]]],
                              cvrs: Iterable[CastVoteRecord]) -> ExplicitVerification:
    """Check claimed groups: every member must be in the CVRs, all with one signature."""
    if not isinstance(claimed, Mapping):
        claimed = {str(n): g for n, g in enumerate(claimed, start=1)}
    by_ref: dict[ImageRef, list[CastVoteRecord]] = defaultdict(list)
    for cvr in cvrs:
        by_ref[cvr.image].append(cvr)
    out = ExplicitVerification()
    seen_refs = set()
    for gid, members in claimed.items():
        refs = tuple(sorted(set(members)))
        seen_refs.update(r for r in refs if r in by_ref)
        if len(refs) < 2:
            out.failures.append(GroupFailure(gid, "too_small", refs))
            continue
        missing = tuple(r for r in refs if r not in by_ref)
        if missing:
            out.failures.append(GroupFailure(gid, "missing_reference", missing))
            continue
        sigs = {vote_signature(c) for r in refs for c in by_ref[r]}
        if len(sigs) != 1:
            out.failures.append(GroupFailure(gid, "signature_mismatch", refs))
            continue
        out.verified.append((gid, DuplicateGroup(refs, "explicit_pairing")))
    out.referenced = len(seen_refs)
    return out


@dataclass(frozen=True)
class SampleDraw:
    population: int
    seed: int
    indices: tuple[int, ...]  # in draw order
    items: tuple


def sample_verification(groups: Sequence, sample_size: int, seed: int) -> SampleDraw:
    """Simple random sample without replacement, fixed by ``seed``."""
    n = len(groups)
    if not 0 <= sample_size <= n:
        raise ValueError(f"sample_size {sample_size} outside [0, {n}]")
    idx = tuple(random.Random(seed).sample(range(n), sample_size))
    return SampleDraw(n, seed, idx, tuple(groups[i] for i in idx))


@dataclass(frozen=True)
class ConfidenceBound:
    population: int
    sample: int
    agreements: int
    confidence: Fraction
    lower_bound: int
    convention: str = "strict"  # tail probability > 1 - confidence

    def as_dict(self) -> dict:
        return {
            "population": self.population,
            "sample": self.sample,
            "agreements": self.agreements,
            "confidence": str(self.confidence),
            "lower_bound": self.lower_bound,
            "convention": ("smallest M with P(X >= k | M) > 1 - confidence" if self.convention == "strict"
                           else "smallest M with P(X >= k | M) >= 1 - confidence"),
        }


def _exact(value) -> Fraction:
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, Decimal):
        return Fraction(value)
    return Fraction(value)


def hypergeometric_tail_count(population: int, sample: int, agreements: int, good: int) -> int:
    """Number of size-``sample`` subsets holding at least ``agreements`` good items."""
    return sum(math.comb(good, x) * math.comb(population - good, sample - x)
               for x in range(agreements, min(sample, good) + 1))


def hypergeometric_lcb(population: int, sample: int, agreements: int, confidence=0.95,
                       *, strict: bool = True) -> ConfidenceBound:
    """Lower confidence bound on the number of genuine items in a population.

    Returns the smallest ``M`` in ``[0, population]`` for which a simple
    random sample of ``sample`` items from a population with ``M`` genuine
    items shows at least ``agreements`` genuine ones with probability greater
    than ``1 - confidence`` (at least, when ``strict`` is false).  All
    arithmetic is on exact integers and fractions.
    """
    conf = _exact(confidence)
    if not 0 < conf < 1:
        raise ValueError("confidence must lie strictly between 0 and 1")
    if not 0 <= agreements <= sample <= population:
        raise ValueError("need 0 <= agreements <= sample <= population")
    alpha = 1 - conf
    total = math.comb(population, sample)
    # compare tail/total with alpha without leaving the integers
    threshold = alpha.numerator * total

    def accepts(m: int) -> bool:
        lhs = hypergeometric_tail_count(population, sample, agreements, m) * alpha.denominator
        return lhs > threshold if strict else lhs >= threshold

    lo, hi = 0, population  # accepts(population) always holds
    while lo < hi:
        mid = (lo + hi) // 2
        if accepts(mid):
            hi = mid
        else:
            lo = mid + 1
    return ConfidenceBound(population, sample, agreements, conf, lo, "strict" if strict else "non-strict")
