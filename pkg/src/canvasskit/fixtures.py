"""Deterministic synthetic election records with planted anomalies.

A fixture spec (a plain dict, stored as ``fixture-spec.json``) describes the
scan batches of each count phase, the presidential tally every phase must
reproduce, and the anomalies to plant: rescanned stretches of batches
(``runs``), hand-identified duplicate sheets (``explicit_multiples``),
missing image files, and audit batch sheets that never made it into the
audit spreadsheet.  :func:`build_dataset` produces in-memory records plus a
ground-truth log kept from the generator's own bookkeeping;
:func:`generate` writes them as canonical files.

Identical spec and seed give byte-identical files.
"""

from __future__ import annotations

import copy
import json
import math
import os
import random
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np

from . import records as rec
from .records import (AuditRow, BatchSheet, CastVoteRecord, ImageRef, Manifest, ManifestEntry,
                      PollbookSummary, PrecinctModeTally, TallyVector, VotingMode)

SPEC_VERSION = 1

PRES = "PRES"
PRES_KEYS = ("TRUMP", "BIDEN", "JORGENSEN", rec.WRITE_IN, rec.OVERVOTE, "UNDERVOTE")
DEFAULT_PRES_SHARES = (0.26, 0.72, 0.012, 0.003, 0.0005, 0.0045)

# contest, candidates, candidate probabilities; the rest of the mass is
# split between undervote and a small write-in share
DOWN_BALLOT = (
    ("SEN", ("PERDUE", "OSSOFF", "HAZEL"), (0.40, 0.55, 0.02)),
    ("DA", ("HOWARD", "WILLIS"), (0.37, 0.60)),
    ("SHERIFF", ("LABAT", "SMITH"), (0.50, 0.45)),
    ("CLERK", ("ROBINSON", "GRANT"), (0.55, 0.40)),
)
WRITE_IN_RATE = 0.002
RARE_CONTEST = 1  # index into DOWN_BALLOT that carries planted rare write-ins

COMMON_WRITE_INS = ("Anyone", "XXX", "Donald Trump", "Mickey Mouse", "None of the above",
                    "Kanye West", "Bernie Sanders")
_FIRST = ("Willie", "Alexander", "Ada", "Grace", "Hedy", "Alan", "Katherine", "Rosalind",
          "Barbara", "Claude", "Dorothy", "Edsger", "Frances", "Gordon", "Ida", "John",
          "Lise", "Marie", "Niels", "Emmy", "Paul", "Rachel", "Srinivasa", "Tim", "Vera")
_LAST = ("Nelson", "Hamilton", "Lovelace", "Hopper", "Lamarr", "Turing", "Johnson", "Franklin",
         "Liskov", "Shannon", "Vaughan", "Dijkstra", "Allen", "Moore", "Wells", "Lewis",
         "Meitner", "Curie", "Bohr", "Noether", "Dirac", "Carson", "Ramanujan", "Berners", "Rubin")

MODE_WORDS = {
    VotingMode.ABSENTEE_BY_MAIL: "Absentee",
    VotingMode.ADVANCE: "Advance",
    VotingMode.ELECTION_DAY: "Election Day",
    VotingMode.PROVISIONAL: "Provisional",
    VotingMode.UNKNOWN: "",
}


class GenerationError(ValueError):
    """The fixture spec cannot be realized; the message names the violated constraint."""


def _rare_names():
    yield "Willie Nelson"
    yield "Alexander Hamilton"
    for last in _LAST:
        for first in _FIRST:
            name = f"{first} {last}"
            if name not in ("Willie Nelson", "Alexander Hamilton"):
                yield name
    n = 0
    while True:
        n += 1
        yield f"Write-in Candidate {n:05d}"


def _allocate(total: int, shares) -> list[int]:
    """Largest-remainder split of ``total`` by ``shares``."""
    raw = [total * s / sum(shares) for s in shares]
    out = [math.floor(x) for x in raw]
    rest = total - sum(out)
    order = sorted(range(len(raw)), key=lambda i: (-(raw[i] - out[i]), i))
    for i in order[:rest]:
        out[i] += 1
    return out


# ----------------------------------------------------------------- dataset

@dataclass
class PhaseData:
    cvrs: list[CastVoteRecord]
    images: list[ImageRef]
    claimed_groups: dict[str, list[ImageRef]] = field(default_factory=dict)


@dataclass
class Dataset:
    phases: dict[str, PhaseData] = field(default_factory=dict)
    sheets: list[BatchSheet] = field(default_factory=list)
    audit_rows: list[AuditRow] = field(default_factory=list)
    manifest: Optional[Manifest] = None
    pollbook: Optional[list[PollbookSummary]] = None
    results: list[PrecinctModeTally] = field(default_factory=list)
    reported_missing_images: dict[str, int] = field(default_factory=dict)
    # officially reported Trump+Biden+Jorgensen per phase, the base for error rates
    reported_candidate_totals: dict[str, int] = field(default_factory=dict)
    ground_truth: dict = field(default_factory=dict)


# ------------------------------------------------------------ CVR phases

class _Slots:
    """Flat view over every scan position of one phase."""

    def __init__(self, batches: list[dict]):
        self.batches = batches
        self.index: dict[tuple[int, int], int] = {}
        self.offset = []
        n = 0
        for b, spec in enumerate(batches):
            key = (spec["scanner"], spec["batch"])
            if key in self.index:
                raise GenerationError(f"batch {key} declared twice")
            self.index[key] = b
            self.offset.append(n)
            n += spec["size"]
        self.n = n
        self.batch_of = np.repeat(np.arange(len(batches)), [b["size"] for b in batches])
        self.pos_of = np.concatenate([np.arange(b["size"]) for b in batches]) if batches else np.zeros(0, int)

    def slot(self, key, seq: int, what: str) -> int:
        key = tuple(key)
        if key not in self.index:
            raise GenerationError(f"{what}: batch {key} is not declared in 'batches'")
        b = self.index[key]
        size = self.batches[b]["size"]
        if not 1 <= seq <= size:
            raise GenerationError(f"{what}: image {seq} outside batch {key} of size {size}")
        return self.offset[b] + seq - 1

    def ref(self, s: int) -> ImageRef:
        b = self.batches[int(self.batch_of[s])]
        return ImageRef.of(b["scanner"], b["batch"], int(self.pos_of[s]) + 1)


def _layout(phase: dict, rng: random.Random) -> list[dict]:
    declared = [dict(b) for b in phase.get("batches", [])]
    total = phase["cvr_count"]
    used = sum(b["size"] for b in declared)
    if used > total:
        raise GenerationError(f"declared batches hold {used} sheets but cvr_count is {total}")
    bg = phase.get("background", {})
    scanners = bg.get("scanners", [1])
    size = bg.get("batch_size", 100)
    modes = [VotingMode(m) for m in bg.get("modes", ["election_day", "advance", "absentee_by_mail"])]
    taken = {(b["scanner"], b["batch"]) for b in declared}
    next_id = dict.fromkeys(scanners, 1)
    out = declared
    remaining = total - used
    k = 0
    while remaining > 0:
        sc = scanners[k % len(scanners)]
        k += 1
        while (sc, next_id[sc]) in taken:
            next_id[sc] += 1
        bid = next_id[sc]
        next_id[sc] += 1
        if bid >= 10 ** 5:
            raise GenerationError("background batch ids exceed 5 digits; add scanners")
        n = min(size, remaining)
        out.append({"scanner": sc, "batch": bid, "size": n, "mode": rng.choice(modes).value})
        remaining -= n
    for b in out:
        if b["size"] <= 0:
            raise GenerationError(f"batch {(b['scanner'], b['batch'])} must hold at least one sheet")
    return out


def _run_pairs(run: dict, slots: _Slots) -> list[tuple[int, int]]:
    what = f"run {run['a']}~{run['b']}"
    length = run["length"]
    if length < 1:
        raise GenerationError(f"{what}: length must be positive")
    orient = run.get("orientation", "same")
    if orient not in ("same", "reversed"):
        raise GenerationError(f"{what}: orientation must be 'same' or 'reversed'")
    if tuple(run["a"]) == tuple(run["b"]):
        raise GenerationError(f"{what}: a run needs two different batches")
    pairs = []
    for t in range(length):
        sb = run["start_b"] + t if orient == "same" else run["start_b"] - t
        try:
            pairs.append((slots.slot(run["a"], run["start_a"] + t, what), slots.slot(run["b"], sb, what)))
        except GenerationError as exc:
            raise GenerationError(f"{exc} (run of length {length} does not fit its batches)") from None
    return pairs


class _DSU:
    def __init__(self, n: int):
        self.p = list(range(n))

    def find(self, x: int) -> int:
        p = self.p
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a: int, b: int):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.p[max(ra, rb)] = min(ra, rb)


def _draw_down(gen: np.random.Generator, n: int, allow_write_in: bool = True) -> np.ndarray:
    """Down-ballot choice codes: candidate index, then undervote, then write-in."""
    cols = []
    for _, cands, probs in DOWN_BALLOT:
        wi = WRITE_IN_RATE if allow_write_in else 0.0
        p = list(probs) + [max(0.0, 1.0 - sum(probs) - wi), wi]
        p = np.array(p) / sum(p)
        cols.append(gen.choice(len(p), size=n, p=p))
    return np.stack(cols, axis=1).astype(np.int16) if n else np.zeros((0, len(DOWN_BALLOT)), np.int16)


def _build_phase(name: str, phase: dict, seed: int):
    rng = random.Random(f"{seed}/{name}/layout")
    gen = np.random.default_rng([seed, sum(map(ord, name))])
    batches = _layout(phase, rng)
    slots = _Slots(batches)
    n = slots.n

    dsu = _DSU(n)
    unique_root: set[int] = set()
    precinct_of_root: dict[int, str] = {}
    run_pairs = []
    for run in phase.get("runs", []):
        pairs = _run_pairs(run, slots)
        run_pairs.append(pairs)
        for s1, s2 in pairs:
            dsu.union(s1, s2)
    explicit_slots = []
    for group in phase.get("explicit_multiples", []):
        ss = []
        for text in group:
            ref = ImageRef.parse(text)
            ss.append(slots.slot(ref.batch, ref.image_seq, f"explicit multiple {text}"))
        if len(set(ss)) < 2:
            raise GenerationError(f"explicit multiple {group} needs two distinct images")
        explicit_slots.append(ss)
        for s in ss[1:]:
            dsu.union(ss[0], s)
    # uniqueness flags resolve after every union
    for run, pairs in zip(phase.get("runs", []), run_pairs):
        for off in run.get("unique_at", []):
            if not 0 <= off < len(pairs):
                raise GenerationError(f"run {run['a']}~{run['b']}: unique_at offset {off} outside run")
            root = dsu.find(pairs[off][0])
            unique_root.add(root)
            if run.get("precinct"):
                precinct_of_root[root] = run["precinct"]
    for group, ss in zip(phase.get("explicit_multiples", []), explicit_slots):
        root = dsu.find(ss[0])
        unique_root.add(root)
        if phase.get("explicit_precinct"):
            precinct_of_root[root] = phase["explicit_precinct"]

    roots = np.array([dsu.find(s) for s in range(n)], dtype=np.int64)
    comp_members: dict[int, list[int]] = defaultdict(list)
    for s in np.flatnonzero(roots != np.arange(n)):
        comp_members[int(roots[s])].append(int(s))
    multi = {}
    for r, rest in comp_members.items():
        members = sorted([r] + rest)
        batches_hit = [int(slots.batch_of[m]) for m in members]
        if len(set(batches_hit)) != len(batches_hit):
            raise GenerationError(f"planted duplicates put one sheet twice in batch "
                                  f"{slots.ref(members[0]).batch}; runs overlap inconsistently")
        multi[r] = members

    # presidential budget
    if "pres_tally" in phase:
        budget = [int(phase["pres_tally"].get(k, 0)) for k in PRES_KEYS]
        if sum(budget) != n:
            raise GenerationError(f"pres_tally sums to {sum(budget)} but cvr_count is {n}")
    else:
        budget = _allocate(n, phase.get("pres_shares", DEFAULT_PRES_SHARES))
    remaining = list(budget)
    pres = np.full(n, -1, dtype=np.int16)
    # a common-ballot group keeps one ordinary sheet with its choice in reserve
    reserved = [False] * len(PRES_KEYS)
    for r in sorted(multi, key=lambda r: (-len(multi[r]), r)):
        size = len(multi[r])
        common = r not in unique_root

        def fits(k):
            return remaining[k] >= size + (1 if common or reserved[k] else 0)

        choices = [k for k in range(3) if fits(k)] or [k for k in range(len(PRES_KEYS)) if fits(k)]
        if not choices:
            raise GenerationError(f"pres_tally cannot cover a duplicate group of {size} sheets")
        k = rng.choices(choices, weights=[remaining[c] for c in choices])[0]
        remaining[k] -= size
        reserved[k] = reserved[k] or common
        pres[multi[r]] = k
    free = np.flatnonzero(pres < 0)
    fill = np.repeat(np.arange(len(PRES_KEYS), dtype=np.int16), remaining)
    gen.shuffle(fill)
    pres[free] = fill

    down = _draw_down(gen, n)
    in_multi = np.zeros(n, dtype=bool)
    for members in multi.values():
        in_multi[members] = True
    pres_text = np.full(n, -1, dtype=np.int32)
    wi_k = PRES_KEYS.index(rec.WRITE_IN)
    texts: list[str] = list(COMMON_WRITE_INS)
    wi_slots = np.flatnonzero(pres == wi_k)
    pres_text[wi_slots] = gen.integers(0, len(COMMON_WRITE_INS), size=len(wi_slots))
    down_text = np.full((n, len(DOWN_BALLOT)), -1, dtype=np.int32)
    for c, (_, cands, _) in enumerate(DOWN_BALLOT):
        wi = np.flatnonzero(down[:, c] == len(cands) + 1)
        down_text[wi, c] = gen.integers(0, len(COMMON_WRITE_INS), size=len(wi))

    rare = _rare_names()
    protected = in_multi.copy()
    witness = np.zeros(n, dtype=bool)
    singles_by_pres: dict[int, list[int]] = defaultdict(list)
    plain = ~in_multi & (down_text.max(axis=1, initial=-1) < 0) & (pres_text < 0)
    for s in np.flatnonzero(plain).tolist():
        singles_by_pres[int(pres[s])].append(s)
    for lst in singles_by_pres.values():
        rng.shuffle(lst)
    for r in sorted(multi):
        members = multi[r]
        k = int(pres[members[0]])
        if k == wi_k:
            t = int(gen.integers(0, len(COMMON_WRITE_INS)))
            pres_text[members] = t
        if r in unique_root:
            row = _draw_down(gen, 1, allow_write_in=False)[0]
            row[RARE_CONTEST] = len(DOWN_BALLOT[RARE_CONTEST][1]) + 1
            down[members] = row
            texts.append(next(rare))
            down_text[members] = -1
            down_text[members, RARE_CONTEST] = len(texts) - 1
        else:
            # copy the votes of an untouched sheet so the signature stays common
            pool = singles_by_pres.get(k, [])
            while pool and protected[pool[-1]]:
                pool.pop()
            if not pool or k == wi_k:
                row = _draw_down(gen, 1, allow_write_in=False)[0]
                wit = _find_witness(pres, down, down_text, pres_text, protected, k, row)
                if wit is None:
                    # share a witness already standing in for another group
                    shared_wit = np.flatnonzero(witness & (pres == k))
                    wit = int(shared_wit[0]) if len(shared_wit) else None
                    if wit is not None:
                        row = down[wit].copy()
                if wit is None:
                    raise GenerationError("too few ordinary sheets to keep planted duplicates of "
                                          f"common ballots ambiguous (pres choice {PRES_KEYS[k]})")
            else:
                wit = pool.pop()
                row = down[wit].copy()
            protected[wit] = witness[wit] = True
            down[members] = row
            down_text[members] = down_text[wit]
            if k == wi_k:
                pres_text[members] = pres_text[wit]

    sig = _signatures(pres, pres_text, down, down_text)
    _repair_boundaries(multi, slots, sig, pres, pres_text, down, down_text, in_multi, witness, gen)

    # precincts
    precincts = phase.get("background", {}).get("precincts", ["P01", "P02", "P03", "P04"])
    prec_idx = gen.integers(0, len(precincts), size=n)
    prec = [precincts[i] for i in prec_idx]
    for b, spec in enumerate(batches):
        if spec.get("precinct"):
            lo = slots.offset[b]
            prec[lo:lo + spec["size"]] = [spec["precinct"]] * spec["size"]
    for r, members in multi.items():
        p = precinct_of_root.get(r, prec[members[0]])
        for m in members:
            prec[m] = p

    # records
    modes = [VotingMode(b.get("mode", "unknown")) for b in batches]
    prefix = name[0].upper()
    cvrs = []
    cand_cols = [cands for _, cands, _ in DOWN_BALLOT]
    shared: dict[tuple, tuple[dict, dict]] = {}  # identical ballots share read-only dicts
    for s in range(n):
        cached = shared.get(sig[s])
        if cached is not None:
            cvrs.append(CastVoteRecord(f"{prefix}{s + 1:07d}", slots.ref(s), modes[int(slots.batch_of[s])],
                                       prec[s], *cached))
            continue
        sel = {}
        wins = {}
        k = int(pres[s])
        sel[PRES] = rec.UNDERVOTE if PRES_KEYS[k] == "UNDERVOTE" else PRES_KEYS[k]
        if pres_text[s] >= 0:
            wins[PRES] = texts[pres_text[s]]
        for c, (contest, _, _) in enumerate(DOWN_BALLOT):
            code = int(down[s, c])
            cands = cand_cols[c]
            if code < len(cands):
                sel[contest] = cands[code]
            elif code == len(cands):
                sel[contest] = rec.UNDERVOTE
            else:
                sel[contest] = rec.WRITE_IN
                wins[contest] = texts[down_text[s, c]]
        shared[sig[s]] = (sel, wins)
        cvrs.append(CastVoteRecord(f"{prefix}{s + 1:07d}", slots.ref(s), modes[int(slots.batch_of[s])],
                                   prec[s], sel, wins))

    # image inventory
    missing_batches = [tuple(k) for k in phase.get("missing_batches", [])]
    absent = np.zeros(n, dtype=bool)
    for key in missing_batches:
        if key not in slots.index:
            raise GenerationError(f"missing batch {key} is not declared in 'batches'")
        b = slots.index[key]
        absent[slots.offset[b]:slots.offset[b] + batches[b]["size"]] = True
    image_count = phase.get("image_count", n - int(absent.sum()))
    drop = n - int(absent.sum()) - image_count
    eligible = np.flatnonzero(~absent & ~in_multi)
    if drop < 0 or drop > len(eligible):
        raise GenerationError(f"image_count {image_count} unreachable: between "
                              f"{n - int(absent.sum()) - len(eligible)} and {n - int(absent.sum())} possible")
    absent[gen.choice(eligible, size=drop, replace=False)] = True
    images = [cvrs[s].image for s in np.flatnonzero(~absent)]

    claimed_src = phase.get("claimed_groups", phase.get("explicit_multiples", []))
    claimed = {str(i): [ImageRef.parse(t) for t in g] for i, g in enumerate(claimed_src, start=1)}

    # ground truth straight from the generator's bookkeeping
    uniq = {r for r in multi if r in unique_root}
    run_roots = {dsu.find(s1) for pairs in run_pairs for s1, _ in pairs}
    explicit_roots = {dsu.find(ss[0]) for ss in explicit_slots}
    physical = Counter()
    detectable = Counter()
    seen_roots = set()
    for s in range(n):
        key = PRES_KEYS[int(pres[s])]
        r = int(roots[s])
        if r in multi:
            if r not in seen_roots:
                physical[key] += 1
                detectable[key] += 1
            elif r not in uniq:
                detectable[key] += 1
            seen_roots.add(r)
        else:
            physical[key] += 1
            detectable[key] += 1
    truth = {
        "cvr_count": n,
        "image_count": len(images),
        "missing_image_count": n - len(images),
        "missing_batches": [list(k) for k in sorted(missing_batches)],
        "pres_tally": dict(zip(PRES_KEYS, budget)),
        "duplicate_components": [
            {"members": sorted(str(slots.ref(m)) for m in multi[r]),
             "unique_signature": r in uniq,
             "source": sorted(({"run"} if r in run_roots else set()) |
                              ({"explicit"} if r in explicit_roots else set()))}
            for r in sorted(multi)],
        "expected_sequence_groups": [sorted(str(slots.ref(m)) for m in multi[r])
                                     for r in sorted(multi) if r in uniq and r in run_roots],
        "expected_explicit_groups": [sorted(str(slots.ref(m)) for m in multi[r])
                                     for r in sorted(multi) if r in explicit_roots],
        "runs": [dict(r) for r in phase.get("runs", [])],
        "physical_pres_tally": dict(sorted(physical.items())),
        "detectable_dedup_pres_tally": dict(sorted(detectable.items())),
        "duplicate_sheet_count": sum(len(m) - 1 for m in multi.values()),
    }
    return PhaseData(cvrs, sorted(images), claimed), truth


def _signatures(pres, pres_text, down, down_text) -> list[tuple]:
    return [(int(pres[s]), int(pres_text[s]), *map(int, down[s]), *map(int, down_text[s]))
            for s in range(len(pres))]


def _find_witness(pres, down, down_text, pres_text, protected, k, row):
    for s in range(len(pres)):
        if not protected[s] and pres[s] == k:
            down[s] = row
            down_text[s] = -1
            return s
    return None


def _repair_boundaries(multi, slots, sig, pres, pres_text, down, down_text, in_multi, witness, gen):
    """Redraw ordinary sheets that would make a planted run look longer.

    For every planted duplicate pair, the diagonal neighbours must differ
    unless they are the same sheet.  Neighbour pairs made only of planted
    sheets are left alone: they never extend a run's own diagonal.  A
    witness sheet in the way hands its role to another ordinary sheet first.
    """
    comp = {}
    for r, members in multi.items():
        for m in members:
            comp[m] = r
    sizes = [b["size"] for b in slots.batches]

    def resign(s):
        sig[s] = (int(pres[s]), int(pres_text[s]), *map(int, down[s]), *map(int, down_text[s]))

    def move_witness(s):
        for t in gen.permutation(len(pres)).tolist():
            if not in_multi[t] and not witness[t] and pres[t] == pres[s] and sig[t] != sig[s]:
                down[t], down_text[t], pres_text[t] = down[s], down_text[s], pres_text[s]
                resign(t)
                witness[t], witness[s] = True, False
                return
        raise GenerationError("no ordinary sheet left to stand in for a common ballot")

    for _ in range(100):
        changed = False
        for members in multi.values():
            for x in range(len(members)):
                for y in range(x + 1, len(members)):
                    u, v = members[x], members[y]
                    bu, bv = int(slots.batch_of[u]), int(slots.batch_of[v])
                    pu, pv = int(slots.pos_of[u]), int(slots.pos_of[v])
                    for du, dv in ((-1, -1), (1, 1), (-1, 1), (1, -1)):
                        qu, qv = pu + du, pv + dv
                        if not (0 <= qu < sizes[bu] and 0 <= qv < sizes[bv]):
                            continue
                        su, sv = slots.offset[bu] + qu, slots.offset[bv] + qv
                        if (in_multi[su] and in_multi[sv]) or sig[su] != sig[sv]:
                            continue
                        target, other = (sv, su) if not in_multi[sv] else (su, sv)
                        if witness[target]:
                            move_witness(target)
                        while sig[target] == sig[other]:
                            down[target] = _draw_down(gen, 1, allow_write_in=False)[0]
                            down_text[target] = -1
                            resign(target)
                        changed = True
        if not changed:
            return
    raise GenerationError("could not separate planted runs from their neighbours")


# ------------------------------------------------------- audit sheets/rows

def _tally_dict(t: TallyVector) -> dict:
    return {k: getattr(t, k) for k in rec.TALLY_FIELDS}


def _sheet_from_dict(d: dict) -> BatchSheet:
    return BatchSheet(d["source_page"], str(d.get("location_or_scanner", "")), str(d["batch_label"]),
                      VotingMode.parse(d.get("mode", "")),
                      TallyVector(*(d.get(k) for k in rec.TALLY_FIELDS)))


def _build_audit(audit: dict, seed: int):
    from .audit_reconcile import normalize_batch_id  # labels must not collide after normalization

    rng = random.Random(f"{seed}/audit")
    gen = np.random.default_rng([seed, 7])
    rows: list[AuditRow] = []
    sheets: list[BatchSheet] = []
    truth: dict[str, Any] = {"counties": {}}
    sheet_counties = [c for c in audit.get("counties", []) if c.get("sheets")]
    if len(sheet_counties) > 1:
        raise GenerationError("batch sheets can be generated for one county only")
    unknown_rate = audit.get("unknown_rate", 0.05)

    for county in audit.get("counties", []):
        name = county["name"]
        n_rows = county["rows"]
        omitted = [_sheet_from_dict(d) for d in county.get("omitted_sheets", [])]
        twins = county.get("twins", [])
        dup_sizes = county.get("duplicate_groups", [])
        fixed_rows = len(twins) + sum(dup_sizes)
        if any(s < 2 for s in dup_sizes):
            raise GenerationError("duplicate_groups sizes must be at least 2")
        if fixed_rows > n_rows:
            raise GenerationError(f"county {name}: twins plus duplicate rows exceed {n_rows} rows")

        tallies: list[tuple[int, int, int]] = []
        labels: list[tuple[str, str, VotingMode, str]] = []  # location, batch label, mode, row name
        forbidden = {s.tally.candidates for s in omitted}
        for tw in twins:
            src = omitted[tw["omitted"]]
            if None in src.tally.candidates:
                raise GenerationError("a twin row needs an omitted sheet with known counts")
            tallies.append(src.tally.candidates)  # type: ignore[arg-type]
            labels.append((str(tw["location_or_scanner"]), str(tw["batch_label"]),
                           VotingMode.parse(tw.get("mode", "")), tw["batch_name"]))
        n_free = n_rows - len(twins)
        totals = county.get("totals")
        if totals is None:
            per = county.get("mean_batch", (70, 190, 4))
            totals = {k: int(v * n_free) for k, v in zip(rec.CANDIDATE_FIELDS, per)}
        rem = [totals[k] - sum(t[i] for t in tallies) for i, k in enumerate(rec.CANDIDATE_FIELDS)]
        if min(rem) < 0:
            raise GenerationError(f"county {name}: twin rows exceed the requested totals")
        # each free row is weighted by a batch size; each duplicate group shares one tally
        units = len(dup_sizes) + (n_free - sum(dup_sizes))
        mult = [s for s in dup_sizes] + [1] * (n_free - sum(dup_sizes))
        free_tallies = _split_totals(gen, rem, mult, units)
        used = Counter(tallies)
        for i, t in enumerate(free_tallies):
            used[t] += mult[i]
        blocked = forbidden | set(tallies)
        _make_distinct(free_tallies, mult, used, blocked, gen)
        for i, t in enumerate(free_tallies):
            tallies.extend([t] * mult[i])

        reserved = {normalize_batch_id(f"{s.location_or_scanner} {s.batch_label}") for s in omitted}
        reserved |= {normalize_batch_id(f"{l[0]} {l[1]}") for l in labels}
        scanners = county.get("scanners", [1, 2, 3, 4, 5, 6])
        next_batch = dict.fromkeys(scanners, 1)
        modes = [VotingMode.ABSENTEE_BY_MAIL, VotingMode.ADVANCE, VotingMode.ELECTION_DAY]
        k = 0
        while len(labels) < n_rows:
            sc = scanners[k % len(scanners)]
            k += 1
            b = next_batch[sc]
            next_batch[sc] += 1
            if normalize_batch_id(f"{sc} {b}") in reserved:
                continue
            mode = rng.choice(modes)
            word = MODE_WORDS[mode]
            labels.append((str(sc), str(b), mode, f"{word} Scanner {sc} Batch {b}"))

        county_rows = [AuditRow(name, lab[3], *t) for lab, t in zip(labels, tallies)]
        order = list(range(n_rows))
        rng.shuffle(order)
        rows.extend(county_rows[i] for i in order)

        ctruth = {
            "rows": n_rows,
            "totals": {k: sum(t[i] for t in tallies) for i, k in enumerate(rec.CANDIDATE_FIELDS)},
            "duplicate_row_count": sum(dup_sizes),
        }
        if county.get("sheets"):
            genuine = []
            for lab, t in zip(labels, tallies):
                extra = [int(x) for x in gen.integers(0, 4, size=3)]
                extra = [None if rng.random() < unknown_rate else x for x in extra]
                mode = VotingMode.UNKNOWN if rng.random() < unknown_rate else lab[2]
                genuine.append(BatchSheet("", lab[0], lab[1], mode, TallyVector(*t, *extra)))
            used_pages = set()
            for s in omitted:
                doc, _, page = s.source_page.partition(" at ")
                used_pages.add((int(doc), int(page)))
            per_doc = math.ceil((len(genuine) + len(omitted)) / 4) + 1
            pages = ((d, p) for d in range(1, 5) for p in range(1, per_doc + 50)
                     if (d, p) not in used_pages)
            placed = []
            for s in genuine:
                d, p = next(pages)
                placed.append(((d, p), BatchSheet(f"{d} at {p}", s.location_or_scanner, s.batch_label,
                                                  s.mode, s.tally)))
            for s in omitted:
                doc, _, page = s.source_page.partition(" at ")
                placed.append(((int(doc), int(page)), s))
            placed.sort(key=lambda x: x[0])
            sheets.extend(s for _, s in placed)
            impact = dict.fromkeys(rec.CANDIDATE_FIELDS, 0)
            wi_unknown = False
            wi = 0
            for s in omitted:
                for i, k in enumerate(rec.CANDIDATE_FIELDS):
                    impact[k] += s.tally.candidates[i] or 0
                if s.tally.write_in is None:
                    wi_unknown = True
                else:
                    wi += s.tally.write_in
            ctruth.update({
                "sheets": len(placed),
                "missing_sheet_pages": [s.source_page for s in omitted],
                "omission_impact": {**impact, "total_known": sum(impact.values()),
                                    "write_in_deficit": None if wi_unknown else wi},
                "tally_collisions": {omitted[tw["omitted"]].source_page: tw["batch_name"] for tw in twins},
            })
        truth["counties"][name] = ctruth
    truth["duplicate_row_count"] = sum(c["duplicate_row_count"] for c in truth["counties"].values())
    return sheets, rows, truth


def _split_totals(gen, rem, mult, units) -> list[tuple[int, int, int]]:
    """Split candidate totals over ``units`` tallies so that
    ``sum(mult[i] * tally[i]) == rem`` exactly."""
    if units == 0:
        if any(rem):
            raise GenerationError("totals left over with no rows to hold them")
        return []
    weights = gen.dirichlet(np.full(units, 4.0))
    out = np.zeros((units, 3), dtype=np.int64)
    m = np.array(mult)
    for c in range(3):
        total = rem[c]
        # grouped units take floor shares; singletons absorb the rest exactly
        share = np.floor(weights * total / m).astype(np.int64)
        singles = np.flatnonzero(m == 1)
        if len(singles) == 0:
            if total % int(m.sum()) and total != int((share * m).sum()):
                raise GenerationError("totals cannot be split over duplicate groups alone")
        left = total - int((share * m).sum())
        if left < 0:
            raise GenerationError("internal split error")
        if len(singles):
            extra = gen.multinomial(left, np.full(len(singles), 1 / len(singles)))
            share[singles] += extra
        elif left:
            raise GenerationError("totals cannot be split exactly over duplicate groups alone")
        out[:, c] = share
    return [tuple(int(x) for x in row) for row in out]


def _make_distinct(tallies, mult, used: Counter, blocked: set, gen) -> None:
    """Nudge tallies until every unit's tally is its own and none is blocked.

    A unit is a single row (``mult`` 1) or a planted group of identical rows.
    Raising one count of a unit by one takes ``mult`` votes from a single
    row, so column totals are preserved.
    """
    singles = [i for i, m in enumerate(mult) if m == 1]
    if not singles:
        return

    def bad(i):
        return used[tallies[i]] > mult[i] or tallies[i] in blocked

    pending = [i for i in range(len(tallies)) if bad(i)]
    for _ in range(200 * len(tallies) + 1000):
        while pending and not bad(pending[-1]):
            pending.pop()
        if not pending:
            return
        i = pending[-1]
        j = singles[int(gen.integers(0, len(singles)))]
        c = int(gen.integers(0, 3))
        if j == i or tallies[j][c] < mult[i]:
            continue
        ti, tj = list(tallies[i]), list(tallies[j])
        ti[c] += 1
        tj[c] -= mult[i]
        used[tallies[i]] -= mult[i]
        used[tallies[j]] -= 1
        tallies[i], tallies[j] = tuple(ti), tuple(tj)
        used[tallies[i]] += mult[i]
        used[tallies[j]] += 1
        if bad(j):
            pending.insert(0, j)
    raise GenerationError("could not make audit row tallies distinct; totals too small for the row count")


# ---------------------------------------------------------------- building

def validate_spec(spec: dict) -> None:
    if spec.get("spec_version", SPEC_VERSION) != SPEC_VERSION:
        raise GenerationError(f"unsupported spec_version {spec.get('spec_version')}")
    if "seed" not in spec:
        raise GenerationError("spec needs an integer 'seed'")
    for name in spec.get("phases", {}):
        if name not in rec.PHASES:
            raise GenerationError(f"unknown phase {name!r}")
        if "cvr_count" not in spec["phases"][name]:
            raise GenerationError(f"phase {name!r} needs cvr_count")


def build_dataset(spec: dict) -> Dataset:
    """Realize ``spec`` in memory.  Raises :class:`GenerationError` early."""
    validate_spec(spec)
    seed = int(spec["seed"])
    ds = Dataset()
    truth: dict[str, Any] = {"spec_version": SPEC_VERSION, "name": spec.get("name", ""),
                             "seed": seed, "phases": {}}
    for name, phase in spec.get("phases", {}).items():
        data, ptruth = _build_phase(name, phase, seed)
        ds.phases[name] = data
        truth["phases"][name] = ptruth
        if "reported_missing_images" in phase:
            ds.reported_missing_images[name] = int(phase["reported_missing_images"])
    ds.reported_candidate_totals = {p: int(v) for p, v in spec.get("reported_candidate_totals", {}).items()}
    counts = {p: t["cvr_count"] for p, t in truth["phases"].items()}
    truth["cvr_count_deltas"] = {f"{a}-{b}": counts[a] - counts[b]
                                 for i, a in enumerate(counts) for b in list(counts)[i + 1:]}
    if "audit" in spec:
        ds.sheets, ds.audit_rows, truth["audit"] = _build_audit(spec["audit"], seed)
    gen = np.random.default_rng([seed, 11])
    if "manifest" in spec:
        m = spec["manifest"]
        size = m.get("container_size", 500)
        total = m["total"]
        entries = []
        k = 0
        while total > 0:
            k += 1
            take = min(size, total)
            entries.append(ManifestEntry(f"BOX-{k:04d}", m.get("location", "Warehouse A"), take))
            total -= take
        ds.manifest = Manifest(tuple(entries))
    if "pollbook" in spec:
        pb = spec["pollbook"]
        precincts = pb.get("precincts", ["P01", "P02", "P03", "P04"])
        modes = [VotingMode.ELECTION_DAY, VotingMode.ADVANCE, VotingMode.ABSENTEE_BY_MAIL]
        cells = [(p, m) for p in precincts for m in modes]
        split = gen.multinomial(pb["total"], np.full(len(cells), 1 / len(cells)))
        ds.pollbook = [PollbookSummary(p, m, int(c)) for (p, m), c in zip(cells, split)]
    ds.results = [PrecinctModeTally(r[0], r[1], VotingMode(r[2]), r[3], int(r[4]))
                  for r in spec.get("results", [])]
    ds.ground_truth = truth
    return ds


def _dump_json(obj, path: Path) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def write_dataset(ds: Dataset, out: os.PathLike, spec: Optional[dict] = None) -> None:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    if spec is not None:
        _dump_json(spec, out / "fixture-spec.json")
    _dump_json(ds.ground_truth, out / "ground_truth.json")
    reported = {}
    if ds.reported_missing_images:
        reported["missing_images"] = ds.reported_missing_images
    if ds.reported_candidate_totals:
        reported["candidate_totals"] = ds.reported_candidate_totals
    if reported:
        _dump_json(reported, out / "reported.json")
    for name, phase in ds.phases.items():
        d = out / name
        d.mkdir(exist_ok=True)
        rec.serialize_cvr_export(phase.cvrs, d / "cvr.csv")
        rec.serialize_image_inventory(phase.images, d / "images.txt")
        rec.serialize_claimed_groups(phase.claimed_groups, d / "claimed-groups.csv")
    if ds.sheets:
        rec.serialize_batch_sheets(ds.sheets, out / "abbs.csv")
    if ds.audit_rows:
        rec.serialize_audit_spreadsheet(ds.audit_rows, out / "audit_rows.csv")
    if ds.manifest is not None:
        rec.serialize_manifest(ds.manifest, out / "manifest.csv")
    if ds.pollbook is not None:
        rec.serialize_pollbook(ds.pollbook, out / "pollbook.csv")
    if ds.results:
        rec.serialize_precinct_results(ds.results, out / "results.csv")


def generate(spec: dict, out: os.PathLike) -> dict:
    """Write the fixture for ``spec`` under ``out``; return its ground truth."""
    ds = build_dataset(spec)
    write_dataset(ds, out, spec)
    return ds.ground_truth


def read_dataset(path: os.PathLike) -> Dataset:
    """Load a directory in the layout written by :func:`generate`.

    Every file is optional; phases are the subdirectories named after a
    count phase that hold a ``cvr.csv``.
    """
    path = Path(path)
    if not path.is_dir():
        raise FileNotFoundError(f"{path} is not a directory")
    ds = Dataset()
    for name in rec.PHASES:
        d = path / name
        if (d / "cvr.csv").exists():
            images = rec.parse_image_inventory(d / "images.txt") if (d / "images.txt").exists() else None
            claimed = (rec.parse_claimed_groups(d / "claimed-groups.csv")
                       if (d / "claimed-groups.csv").exists() else {})
            ds.phases[name] = PhaseData(rec.parse_cvr_export(d / "cvr.csv"), images, claimed)
    if (path / "abbs.csv").exists():
        ds.sheets = rec.parse_batch_sheets(path / "abbs.csv")
    if (path / "audit_rows.csv").exists():
        ds.audit_rows = rec.parse_audit_spreadsheet(path / "audit_rows.csv")
    if (path / "manifest.csv").exists():
        ds.manifest = rec.parse_manifest(path / "manifest.csv")
    if (path / "pollbook.csv").exists():
        ds.pollbook = rec.parse_pollbook(path / "pollbook.csv")
    if (path / "results.csv").exists():
        ds.results = rec.parse_precinct_results(path / "results.csv")
    if (path / "reported.json").exists():
        reported = json.loads((path / "reported.json").read_text(encoding="utf-8"))
        ds.reported_missing_images = {k: int(v) for k, v in reported.get("missing_images", {}).items()}
        ds.reported_candidate_totals = {k: int(v) for k, v in reported.get("candidate_totals", {}).items()}
    if (path / "ground_truth.json").exists():
        ds.ground_truth = json.loads((path / "ground_truth.json").read_text(encoding="utf-8"))
    return ds


def load_spec(path: os.PathLike) -> dict:
    with open(path, encoding="utf-8") as fh:
        spec = json.load(fh)
    validate_spec(spec)
    return spec


def with_seed(spec: dict, seed: int) -> dict:
    out = copy.deepcopy(spec)
    out["seed"] = seed
    return out


# ----------------------------------------------------------------- presets

# Hand-tally sheets missing from the Fulton audit spreadsheet.  Rows 1-3 have
# count twins in the spreadsheet under other batch names.
TABLE1_SHEETS = (
    {"source_page": "4 at 162", "location_or_scanner": "3", "batch_label": "48", "mode": "absentee",
     "trump": 4, "biden": 93, "jorgensen": 2, "write_in": 0, "undervote_blank": 0, "overvote": 0},
    {"source_page": "1 at 1", "location_or_scanner": "2", "batch_label": "52", "mode": "absentee",
     "trump": 6, "biden": 92, "jorgensen": 0, "write_in": 0, "undervote_blank": 0, "overvote": 0},
    {"source_page": "4 at 128", "location_or_scanner": "3", "batch_label": "12--14", "mode": "?",
     "trump": 12, "biden": 83, "jorgensen": 1, "write_in": 0, "undervote_blank": 0, "overvote": 0},
    {"source_page": "3 at 177", "location_or_scanner": "3", "batch_label": "239", "mode": "?",
     "trump": 13, "biden": 87, "jorgensen": 0, "write_in": 0, "undervote_blank": 0, "overvote": 0},
    {"source_page": "3 at 519", "location_or_scanner": "1", "batch_label": "80--84", "mode": "?",
     "trump": 118, "biden": 329, "jorgensen": 3, "write_in": 2, "undervote_blank": 2, "overvote": 1},
    {"source_page": "4 at 355", "location_or_scanner": "3", "batch_label": "260", "mode": "absentee",
     "trump": 30, "biden": 66, "jorgensen": 0, "write_in": 0, "undervote_blank": 0, "overvote": 0},
    {"source_page": "1 at 170", "location_or_scanner": "", "batch_label": "AP01A-1", "mode": "election day",
     "trump": 84, "biden": 62, "jorgensen": 6, "write_in": 2, "undervote_blank": 1, "overvote": 0},
    {"source_page": "4 at 293", "location_or_scanner": "3", "batch_label": "179--181", "mode": "absentee",
     "trump": 85, "biden": 224, "jorgensen": 5, "write_in": 1, "undervote_blank": 2, "overvote": 0},
    {"source_page": "2 at 153", "location_or_scanner": "2", "batch_label": "239", "mode": "absentee",
     "trump": 4, "biden": 42, "jorgensen": 0, "write_in": 0, "undervote_blank": 0, "overvote": 0},
    {"source_page": "3 at 351", "location_or_scanner": "Chastain", "batch_label": "12", "mode": "advance",
     "trump": 613, "biden": 605, "jorgensen": 24, "write_in": 7, "undervote_blank": 4, "overvote": 0},
    {"source_page": "3 at 270", "location_or_scanner": "Chastain", "batch_label": "114", "mode": "advance",
     "trump": 613, "biden": 605, "jorgensen": 24, "write_in": None, "undervote_blank": 4, "overvote": 0},
)
TABLE1_TWINS = (
    {"omitted": 0, "batch_name": "Scanner 3 Ballot 162", "location_or_scanner": "3",
     "batch_label": "162", "mode": "absentee"},
    {"omitted": 1, "batch_name": "Absentee Scanner 2 Batch 400", "location_or_scanner": "2",
     "batch_label": "400", "mode": "absentee"},
    {"omitted": 2, "batch_name": "Absentee Scanner 3 Batch 253", "location_or_scanner": "3",
     "batch_label": "253", "mode": "absentee"},
)
FULTON_AUDIT_TOTALS = {"trump": 137620, "biden": 381179, "jorgensen": 6494}

# Presidential tallies of the two machine counts
TABLE3 = {"original": (137240, 381144, 6275), "recount": (137247, 380212, 6320)}

# Original-count image pairs in scanner 5162, batches 234/235
TABLE4_PAIRS = ((96, 57), (93, 54), (74, 36), (72, 34), (68, 30), (69, 31), (54, 14),
                (31, 90), (26, 85), (17, 76), (13, 72), (14, 73), (3, 62), (1, 60))

TABLE5_GROUPS = (
    ("00801_00044_000168", "00801_00043_000168"),
    ("00801_00044_000083", "00801_00043_000083"),
    ("00801_00044_000042", "00801_00043_000042"),
    ("05160_00074_000023", "05160_00067_000008"),
    ("00794_00017_000024", "00791_00026_000091", "00791_00019_000010"),
    ("00794_00017_000029", "00791_00026_000086", "00791_00019_000015"),
    ("00794_00018_000001", "00791_00026_000009", "00791_00019_000092"),
    ("00794_00018_000011", "00791_00026_000019", "00791_00019_000082"),
    ("00794_00019_000002", "00791_00026_000079", "00791_00019_000022"),
    ("00794_00019_000005", "00791_00026_000076", "00791_00019_000025"),
    ("00794_00019_000006", "00791_00026_000075", "00791_00019_000026"),
)

# (phase, mode) -> (Trump, Biden, Jorgensen) in precinct RW01; the audit has
# election-day figures only
TABLE2 = {
    ("original", "election_day"): (193, 88, 11), ("original", "advance"): (1455, 1003, 23),
    ("original", "absentee_by_mail"): (619, 833, 15), ("original", "provisional"): (9, 4, 1),
    ("recount", "election_day"): (162, 73, 9), ("recount", "advance"): (1487, 1015, 25),
    ("recount", "absentee_by_mail"): (619, 809, 15), ("recount", "provisional"): (5, 3, 1),
    ("audit", "election_day"): (243, 88, 11),
}


def _pres_tally(counts: tuple[int, int, int], total: int) -> dict:
    rest = _allocate(total - sum(counts), DEFAULT_PRES_SHARES[3:])
    return dict(zip(PRES_KEYS, (*counts, *rest)))


def _recount_anomalies() -> dict:
    """Scan batches, runs and unique positions that reproduce the recount multiples."""
    rw = "RW01"
    batches = [
        {"scanner": 801, "batch": 43, "size": 250, "mode": "advance", "precinct": rw},
        {"scanner": 801, "batch": 44, "size": 230, "mode": "advance", "precinct": rw},
        {"scanner": 5160, "batch": 67, "size": 90, "mode": "election_day", "precinct": rw},
        {"scanner": 5160, "batch": 74, "size": 100, "mode": "election_day", "precinct": rw},
        {"scanner": 791, "batch": 19, "size": 100, "mode": "absentee_by_mail", "precinct": rw},
        {"scanner": 791, "batch": 26, "size": 100, "mode": "absentee_by_mail", "precinct": rw},
        {"scanner": 794, "batch": 17, "size": 40, "mode": "absentee_by_mail", "precinct": rw},
        {"scanner": 794, "batch": 18, "size": 30, "mode": "absentee_by_mail", "precinct": rw},
        {"scanner": 794, "batch": 19, "size": 35, "mode": "absentee_by_mail", "precinct": rw},
        {"scanner": 801, "batch": 117, "size": 100, "mode": "advance"},
        {"scanner": 801, "batch": 118, "size": 100, "mode": "advance"},
    ]
    runs = [
        # the first 214 cards of two advance batches were scanned twice
        {"a": [801, 43], "b": [801, 44], "start_a": 1, "start_b": 1, "length": 214,
         "orientation": "same", "unique_at": [41, 82, 167]},
        {"a": [5160, 67], "b": [5160, 74], "start_a": 1, "start_b": 16, "length": 20,
         "orientation": "same", "unique_at": [7]},
        # one absentee stack scanned twice, once upside down, then again in three pieces
        {"a": [791, 19], "b": [791, 26], "start_a": 1, "start_b": 100, "length": 100,
         "orientation": "reversed", "unique_at": [9, 14, 21, 24, 25, 81, 91]},
        {"a": [794, 17], "b": [791, 26], "start_a": 15, "start_b": 100, "length": 20,
         "orientation": "reversed", "unique_at": [9, 14]},
        {"a": [794, 18], "b": [791, 26], "start_a": 1, "start_b": 9, "length": 20,
         "orientation": "same", "unique_at": [0, 10]},
        {"a": [794, 19], "b": [791, 26], "start_a": 1, "start_b": 80, "length": 30,
         "orientation": "reversed", "unique_at": [1, 4, 5]},
    ]
    return {"batches": batches, "runs": runs, "missing_batches": [[801, 117], [801, 118]],
            "claimed_groups": [list(g) for g in TABLE5_GROUPS]}


def _original_anomalies() -> dict:
    rw = "RW01"
    return {
        "batches": [
            {"scanner": 5162, "batch": 234, "size": 100, "mode": "absentee_by_mail", "precinct": rw},
            {"scanner": 5162, "batch": 235, "size": 95, "mode": "absentee_by_mail", "precinct": rw},
        ],
        "explicit_multiples": [[f"05162_00234_{a:06d}", f"05162_00235_{b:06d}"] for a, b in TABLE4_PAIRS],
        "explicit_precinct": rw,
    }


def _results_rows() -> list[list]:
    out = []
    for (phase, mode), votes in TABLE2.items():
        for cand, v in zip(("Trump", "Biden", "Jorgensen"), votes):
            out.append([phase, "RW01", mode, cand, v])
    return out


def _fulton_audit(extra_duplicates: tuple[int, ...] = (2, 2, 2, 3)) -> dict:
    return {
        "counties": [{
            "name": "Fulton", "rows": 1916, "sheets": True, "totals": dict(FULTON_AUDIT_TOTALS),
            "omitted_sheets": [dict(s) for s in TABLE1_SHEETS], "twins": [dict(t) for t in TABLE1_TWINS],
            "duplicate_groups": list(extra_duplicates),
        }],
    }


_BACKGROUND_SCANNERS = [800 + i for i in range(6)] + [5160 + i for i in range(6)] + [790 + i for i in range(6)]


def preset_paper_fulton(scale: str = "full", seed: int = 2020) -> dict:
    """Fulton County records carrying the published anomalies.

    ``scale="full"`` reproduces the published magnitudes (about 530k CVRs
    per machine count); ``scale="desk"`` keeps every planted anomaly and the
    851-card difference between the counts but only a few thousand CVRs.
    """
    if scale == "full":
        counts = {"original": 528776, "recount": 527925}
        images = {"original": 168726, "recount": 510073}
        tallies = {p: _pres_tally(TABLE3[p], counts[p]) for p in counts}
        bg = {"scanners": _BACKGROUND_SCANNERS, "batch_size": 100,
              "precincts": [f"{p}{i:02d}" for p in ("RW", "SS", "JC", "AP") for i in range(1, 16)]}
    elif scale == "desk":
        counts = {"original": 5851, "recount": 5000}
        images = {"original": 1866, "recount": 4700}
        tallies = {}
        bg = {"scanners": _BACKGROUND_SCANNERS[:6], "batch_size": 100,
              "precincts": ["RW01", "RW02", "SS01", "JC01"]}
    else:
        raise GenerationError(f"unknown scale {scale!r}; use 'full' or 'desk'")
    phases = {}
    for name, extra in (("original", _original_anomalies()), ("recount", _recount_anomalies())):
        phase = {"cvr_count": counts[name], "image_count": images[name], "background": bg, **extra}
        if name in tallies:
            phase["pres_tally"] = tallies[name]
        phases[name] = phase
    spec = {
        "spec_version": SPEC_VERSION,
        "name": "paper-fulton" if scale == "full" else "paper-fulton-desk",
        "seed": seed,
        "phases": phases,
        "audit": _fulton_audit(),
        "results": _results_rows(),
    }
    if scale == "full":
        phases["original"]["reported_missing_images"] = 376863
        spec["reported_candidate_totals"] = {p: sum(TABLE3[p]) for p in TABLE3}
    return spec


def preset_statewide_audit(seed: int = 2020, rows: int = 41881, duplicate_rows: int = 16807,
                           counties: int = 159) -> dict:
    """Audit rows for every county, with a known number of repeated tallies."""
    rng = random.Random(seed)
    fulton = _fulton_audit()["counties"][0]
    fulton_dups = sum(fulton["duplicate_groups"])
    others = counties - 1
    row_split = _allocate(rows - fulton["rows"], [rng.uniform(0.5, 1.5) for _ in range(others)])
    dup_split = _allocate(duplicate_rows - fulton_dups, row_split)
    out = [fulton]
    for i, (n, d) in enumerate(zip(row_split, dup_split), start=1):
        d = min(d, n - 2)
        sizes = []
        while d >= 2:
            s = 3 if d in (3, 5) or (d > 6 and rng.random() < 0.15) else 2
            sizes.append(s)
            d -= s
        if d:  # one row left over: grow the last group
            sizes[-1] += 1
        out.append({"name": f"County {i:03d}", "rows": n, "duplicate_groups": sizes})
    got = sum(sum(c["duplicate_groups"]) for c in out)
    if got != duplicate_rows or sum(c["rows"] for c in out) != rows:
        raise GenerationError(f"statewide split produced {got} duplicate rows, wanted {duplicate_rows}")
    return {"spec_version": SPEC_VERSION, "name": "paper-statewide-audit", "seed": seed,
            "audit": {"counties": out}}


def preset_clean(seed: int = 1) -> dict:
    """Balanced books: one count, every image present, nothing planted."""
    n = 2000
    return {
        "spec_version": SPEC_VERSION, "name": "clean", "seed": seed,
        "phases": {"original": {"cvr_count": n, "background": {"scanners": [1, 2], "batch_size": 100}}},
        "audit": {"counties": [{"name": "Clean", "rows": 60, "sheets": True}]},
        "manifest": {"total": n, "container_size": 300},
        "pollbook": {"total": n},
        "results": [[p, "P01", "election_day", c, v] for p in ("original", "recount")
                    for c, v in (("Trump", 500), ("Biden", 1400))],
    }


PRESETS = {
    "paper-fulton": lambda: preset_paper_fulton("full"),
    "paper-fulton-desk": lambda: preset_paper_fulton("desk"),
    "paper-statewide-audit": preset_statewide_audit,
    "clean": preset_clean,
}


def preset(name: str) -> dict:
    try:
        return PRESETS[name]()
    except KeyError:
        raise GenerationError(f"unknown preset {name!r}; choose from {', '.join(sorted(PRESETS))}") from None


def random_small_spec(seed: int) -> dict:
    """A small single-count spec with random runs and explicit multiples.

    Used to cross-check detectors against the generator's ground truth.
    """
    rng = random.Random(seed)
    batches, runs, explicit = [], [], []
    next_batch = iter(range(1, 1000))

    def new_batch(lo, hi):
        b = {"scanner": 900, "batch": next(next_batch), "size": rng.randint(lo, hi),
             "mode": rng.choice(["advance", "absentee_by_mail", "election_day"])}
        batches.append(b)
        return b

    for _ in range(rng.randint(1, 2)):
        a, b = new_batch(15, 40), new_batch(15, 40)
        length = rng.randint(10, min(a["size"], b["size"]))
        sa = rng.randint(1, a["size"] - length + 1)
        orient = rng.choice(["same", "reversed"])
        if orient == "same":
            sb = rng.randint(1, b["size"] - length + 1)
        else:
            sb = rng.randint(length, b["size"])
        uniq = sorted(rng.sample(range(length), rng.randint(0, 3)))
        runs.append({"a": [900, a["batch"]], "b": [900, b["batch"]], "start_a": sa, "start_b": sb,
                     "length": length, "orientation": orient, "unique_at": uniq})
        if rng.random() < 0.3:
            # rescanned a third time, chained to the first batch
            c = new_batch(length, length + 10)
            sc = rng.randint(1, c["size"] - length + 1)
            runs.append({"a": [900, a["batch"]], "b": [900, c["batch"]], "start_a": sa, "start_b": sc,
                         "length": length, "orientation": "same", "unique_at": uniq[:1]})
    if rng.random() < 0.7:
        a, b = new_batch(20, 40), new_batch(20, 40)
        k = rng.randint(1, 4)
        for x, y in zip(rng.sample(range(1, a["size"] + 1), k), rng.sample(range(1, b["size"] + 1), k)):
            explicit.append([str(ImageRef.of(900, a["batch"], x)), str(ImageRef.of(900, b["batch"], y))])
    missing = []
    if rng.random() < 0.5:
        m = new_batch(5, 20)
        missing.append([900, m["batch"]])
    declared = sum(b["size"] for b in batches)
    total = declared + rng.randint(100, 400)
    missing_size = sum(b["size"] for b in batches if [900, b["batch"]] in missing)
    phase = {"cvr_count": total, "batches": batches, "runs": runs, "explicit_multiples": explicit,
             "missing_batches": missing, "image_count": total - missing_size - rng.randint(0, 20),
             "background": {"scanners": [901, 902], "batch_size": rng.randint(25, 50)}}
    omitted = []
    for k in range(rng.randint(0, 3)):
        omitted.append({"source_page": f"1 at {900 + k}", "location_or_scanner": "9",
                        "batch_label": str(500 + k), "mode": "absentee",
                        "trump": rng.randint(0, 100), "biden": rng.randint(0, 300),
                        "jorgensen": rng.randint(0, 9),
                        "write_in": rng.choice([None, 0, 1]), "undervote_blank": 0, "overvote": 0})
    county = {"name": "Testing", "rows": rng.randint(20, 60), "sheets": True,
              "omitted_sheets": omitted,
              "duplicate_groups": [2] * rng.randint(0, 2)}
    return {"spec_version": SPEC_VERSION, "name": f"random-{seed}", "seed": seed,
            "phases": {"original": phase}, "audit": {"counties": [county]}}
