from __future__ import annotations

import random
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from canvasskit import canvass as cv
from canvasskit import dup_forensics as df
from canvasskit.records import (CastVoteRecord, ImageRef, Manifest, ManifestEntry, PollbookSummary,
                                PrecinctModeTally, VotingMode)


def cvr(scanner, batch, seq, pres="BIDEN", cid=None):
    return CastVoteRecord(cid or f"{scanner}-{batch}-{seq}", ImageRef(scanner, batch, seq), VotingMode.ADVANCE,
                          "RW01", {"PRES": pres})


def result(phase, mode, cand, votes, precinct="RW01"):
    return PrecinctModeTally(phase, precinct, mode, cand, votes)


# -------------------------------------------------------------- accounting

def test_balanced_books_have_no_findings():
    cvrs = [cvr(1, 1, k) for k in range(1, 11)]
    ledger = cv.count_reconciliation({"original": cvrs}, {"original": [c.image for c in cvrs]},
                                     Manifest((ManifestEntry("box", "w", 10),)),
                                     [PollbookSummary("RW01", VotingMode.ADVANCE, 10)])
    assert ledger.findings() == []


def test_count_mismatches_and_missing_batches():
    cvrs = [cvr(1, 1, k) for k in range(1, 6)] + [cvr(1, 2, k) for k in range(1, 4)]
    images = [ImageRef(1, 1, k) for k in range(1, 5)] + [ImageRef(9, 9, 9)]
    ledger = cv.count_reconciliation({"recount": cvrs}, {"recount": images},
                                     Manifest((ManifestEntry("box", "w", 8),)), None)
    assert ledger.missing_image_refs["recount"] == [ImageRef(1, 1, 5)] + [ImageRef(1, 2, k) for k in range(1, 4)]
    assert ledger.missing_batches["recount"] == [(1, 2)]
    assert ledger.unreferenced_images["recount"] == 1
    kinds = Counter(f["kind"] for f in ledger.findings())
    assert kinds == {"count_mismatch": 2, "missing_images": 1, "missing_batch": 1, "unreferenced_images": 1}
    mismatch = {(f["left"], f["right"]): f["difference"] for f in ledger.findings() if f["kind"] == "count_mismatch"}
    assert mismatch == {("cvrs", "images"): 3, ("images", "manifest"): -3}


def test_phase_count_delta():
    a = [cvr(1, 1, k) for k in range(1, 12)]
    ledger = cv.count_reconciliation({"original": a, "recount": a[:10]}, {})
    [delta] = [f for f in ledger.findings() if f["kind"] == "cvr_count_phase_delta"]
    assert delta["difference"] == 1


def test_reported_missing_disagreement_is_a_finding():
    cvrs = [cvr(1, 1, k) for k in range(1, 6)]
    ledger = cv.count_reconciliation({"original": cvrs}, {"original": [ImageRef(1, 1, 1)]},
                                     reported_missing_images={"original": 7})
    [f] = [f for f in ledger.findings() if f["kind"] == "reported_missing_disagrees"]
    assert (f["reported"], f["derived"]) == (7, 4)


def test_findings_are_a_function_of_ledger_fields(desk):
    ds = desk
    ledger = cv.count_reconciliation({p: ph.cvrs for p, ph in ds.phases.items()},
                                     {p: ph.images for p, ph in ds.phases.items()},
                                     ds.manifest, ds.pollbook, ds.reported_missing_images)
    copy = cv.AccountingLedger(**{k: getattr(ledger, k) for k in ledger.__dataclass_fields__})
    assert copy.findings() == ledger.findings()
    assert ledger.missing_batches["recount"] == [(801, 117), (801, 118)]
    for phase, refs in ledger.missing_image_refs.items():
        assert set(refs) <= {c.image for c in ds.phases[phase].cvrs}


# -------------------------------------------------------- phase comparison

def table2_results():
    return [result("original", VotingMode.ELECTION_DAY, "Trump", 193),
            result("recount", VotingMode.ELECTION_DAY, "Trump", 162),
            result("audit", VotingMode.ELECTION_DAY, "Trump", 243),
            result("original", VotingMode.ABSENTEE_BY_MAIL, "Biden", 833),
            result("recount", VotingMode.ABSENTEE_BY_MAIL, "Biden", 809)]


def test_table2_examples():
    d = {(x.mode, x.candidate): x for x in cv.phase_compare(table2_results())}
    ed = d[(VotingMode.ELECTION_DAY, "Trump")]
    assert ed.delta("audit", "original") == 50 and ed.delta("audit", "recount") == 81
    ab = d[(VotingMode.ABSENTEE_BY_MAIL, "Biden")]
    assert ab.delta("original", "recount") == 24
    assert ab.relative_to_original("recount") == Fraction(-24, 833)
    assert ab.missing_phases == ("audit",)


def test_identical_phases_give_zero_deltas():
    rows = [result(p, VotingMode.ADVANCE, "Trump", 10) for p in ("original", "recount", "audit")]
    [d] = cv.phase_compare(rows)
    assert set(d.differences.values()) == {0}


def test_single_phase_cells_are_skipped():
    assert cv.phase_compare([result("original", VotingMode.ADVANCE, "Trump", 10)]) == []


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.sampled_from(["original", "recount", "audit"]),
                          st.sampled_from(list(VotingMode)), st.sampled_from(["Trump", "Biden"]),
                          st.integers(0, 10 ** 6)), max_size=20))
def test_deltas_antisymmetric(rows):
    for d in cv.phase_compare(result(p, m, c, v) for p, m, c, v in rows):
        for (a, b), v in d.differences.items():
            assert v == -d.differences[(b, a)] == d.values[a] - d.values[b]


# ---------------------------------------------------------------- tallies

def test_tally_counts_undervotes_and_skips_absent_contest():
    cvrs = [cvr(1, 1, 1, "TRUMP"), cvr(1, 1, 2, ""), cvr(1, 1, 3, "BIDEN"),
            CastVoteRecord("x", ImageRef(1, 1, 4), VotingMode.ADVANCE, "P", {"SEN": "A"})]
    assert cv.tally_cvrs(cvrs, "PRES") == Counter({"TRUMP": 1, "BIDEN": 1, "UNDERVOTE": 1})
    assert cv.tally_cvrs([], "PRES") == Counter()


@pytest.mark.parametrize("seed", range(20))
def test_tally_is_permutation_invariant(seed, desk):
    cvrs = list(desk.phases["original"].cvrs[:500])
    random.Random(seed).shuffle(cvrs)
    assert cv.tally_cvrs(cvrs, "PRES") == cv.tally_cvrs(desk.phases["original"].cvrs[:500], "PRES")


def test_twenty_nine_cvrs_in_eleven_groups():
    sizes = [2] * 4 + [3] * 7
    cvrs, groups, seq = [], [], 1
    for size in sizes:
        members = []
        for _ in range(size):
            cvrs.append(cvr(801, 1, seq))
            members.append(ImageRef(801, 1, seq))
            seq += 1
        groups.append(df.DuplicateGroup(tuple(members), "explicit_pairing"))
    assert len(cvrs) == 29
    out = cv.dedup_adjusted_tally(cvrs, groups, "PRES")
    assert out.removed == Counter({"BIDEN": 18})
    assert out.adjusted["BIDEN"] == 11


def test_no_groups_means_no_change(desk):
    cvrs = desk.phases["recount"].cvrs
    out = cv.dedup_adjusted_tally(cvrs, [], "PRES")
    assert +out.adjusted == +cv.tally_cvrs(cvrs, "PRES") and not out.removed


def test_conflicting_group_is_rejected():
    cvrs = [cvr(1, 1, 1, "BIDEN"), cvr(1, 1, 2, "TRUMP"), cvr(1, 1, 3, "BIDEN")]
    bad = df.DuplicateGroup((ImageRef(1, 1, 1), ImageRef(1, 1, 2)), "explicit_pairing")
    gone = df.DuplicateGroup((ImageRef(1, 1, 1), ImageRef(7, 7, 7)), "explicit_pairing")
    out = cv.dedup_adjusted_tally(cvrs, [bad, gone], "PRES")
    assert [why for _, why in out.rejected] == ["conflicting_signatures", "missing_reference"]
    assert out.adjusted == cv.tally_cvrs(cvrs, "PRES")


def test_overlapping_groups_merge():
    cvrs = [cvr(1, 1, k) for k in range(1, 4)]
    g1 = df.DuplicateGroup((ImageRef(1, 1, 1), ImageRef(1, 1, 2)), "sequence_run")
    g2 = df.DuplicateGroup((ImageRef(1, 1, 2), ImageRef(1, 1, 3)), "explicit_pairing")
    assert cv.dedup_adjusted_tally(cvrs, [g1, g2, g1], "PRES").removed == Counter({"BIDEN": 2})


def test_dedup_never_exceeds_raw_tally(desk):
    ph = desk.phases["recount"]
    groups = df.detect_sequence_runs(df.batch_sequences(ph.cvrs))
    out = cv.dedup_adjusted_tally(ph.cvrs, groups, "PRES")
    raw = cv.tally_cvrs(ph.cvrs, "PRES")
    assert all(out.adjusted[k] <= raw[k] for k in raw)
    assert sum(out.adjusted.values()) < sum(raw.values())
    assert +out.adjusted == +Counter(desk.ground_truth["phases"]["recount"]["detectable_dedup_pres_tally"])
