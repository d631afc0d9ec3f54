from __future__ import annotations

import io
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from canvasskit import records as rec
from canvasskit.records import (AuditRow, BatchSheet, CastVoteRecord, ImageRef, Manifest, ManifestEntry,
                                ParseError, PollbookSummary, PrecinctModeTally, SchemaError, TallyVector,
                                ValidationError, VotingMode)

CVR_HEAD = ",".join(rec.CVR_HEADER) + "\n"
ABBS_HEAD = ",".join(rec.ABBS_HEADER) + "\n"


def text(s: str) -> io.StringIO:
    return io.StringIO(s)


# ------------------------------------------------------------- image refs

def test_image_ref_canonical_form():
    ref = ImageRef.parse("05162_00234_000096")
    assert ref == ImageRef(5162, 234, 96)
    assert str(ref) == "05162_00234_000096"
    assert ref.batch == (5162, 234)


@pytest.mark.parametrize("bad", ["5162_234_96", "05162-00234-000096", "05162_00234_0000960", "", "a_b_c"])
def test_image_ref_rejects_non_canonical(bad):
    with pytest.raises(ValueError):
        ImageRef.parse(bad)


def test_image_ref_order_is_lexicographic():
    refs = [ImageRef(2, 0, 0), ImageRef(1, 5, 9), ImageRef(1, 5, 2), ImageRef(1, 4, 99)]
    assert sorted(refs) == [ImageRef(1, 4, 99), ImageRef(1, 5, 2), ImageRef(1, 5, 9), ImageRef(2, 0, 0)]


@given(st.integers(0, 99999), st.integers(0, 99999), st.integers(0, 999999))
def test_image_ref_parse_format_identity(s, b, i):
    ref = ImageRef.of(s, b, i)
    assert ImageRef.parse(str(ref)) == ref
    assert str(ImageRef.parse(str(ref))) == str(ref)


def test_image_ref_width_checked():
    with pytest.raises(ValueError):
        ImageRef.of(100000, 0, 0)


# ----------------------------------------------------------------- modes

@pytest.mark.parametrize("raw,mode", [("", VotingMode.UNKNOWN), ("?", VotingMode.UNKNOWN),
                                      ("absentee", VotingMode.ABSENTEE_BY_MAIL),
                                      ("Election Day", VotingMode.ELECTION_DAY),
                                      ("advance", VotingMode.ADVANCE),
                                      ("provisional", VotingMode.PROVISIONAL)])
def test_mode_aliases(raw, mode):
    assert VotingMode.parse(raw) is mode


def test_unrecognized_mode_is_an_error_not_a_guess():
    with pytest.raises(ValueError):
        VotingMode.parse("early")


# ------------------------------------------------------------------ CVRs

def test_parse_cvr_row_with_paper_identifier():
    src = CVR_HEAD + "c1,5162,234,96,absentee_by_mail,RW01,PRES,TRUMP,\n"
    [cvr] = rec.parse_cvr_export(text(src))
    assert cvr.image == ImageRef.parse("05162_00234_000096")
    assert cvr.selections == {"PRES": "TRUMP"}
    assert cvr.mode is VotingMode.ABSENTEE_BY_MAIL


def test_parse_cvr_header_only():
    assert rec.parse_cvr_export(text(CVR_HEAD)) == []


def test_cvr_round_trip_three_rows():
    cvrs = [
        CastVoteRecord("a", ImageRef(1, 2, 3), VotingMode.ADVANCE, "P1", {"PRES": "BIDEN", "DA": ""}),
        CastVoteRecord("b", ImageRef(1, 2, 4), VotingMode.ADVANCE, "P1", {"PRES": rec.WRITE_IN},
                       {"PRES": "Willie Nelson"}),
        CastVoteRecord("c", ImageRef(1, 2, 3), VotingMode.UNKNOWN, "P2", {"PRES": rec.OVERVOTE}),
    ]
    out = rec.to_text(rec.serialize_cvr_export, cvrs)
    assert rec.parse_cvr_export(text(out)) == cvrs
    assert rec.to_text(rec.serialize_cvr_export, rec.parse_cvr_export(text(out))) == out


def test_malformed_image_reports_line_and_column():
    src = CVR_HEAD + "c1,1,2,3,advance,P,PRES,BIDEN,\nc2,1,x2,3,advance,P,PRES,BIDEN,\n"
    with pytest.raises(ParseError) as exc:
        rec.parse_cvr_export(text(src))
    assert exc.value.line == 3
    assert exc.value.column == "batch"


def test_duplicate_contest_is_schema_error():
    src = CVR_HEAD + "c1,1,2,3,advance,P,PRES,BIDEN,\nc1,1,2,3,advance,P,PRES,TRUMP,\n"
    with pytest.raises(SchemaError) as exc:
        rec.parse_cvr_export(text(src))
    assert exc.value.line == 3


def test_wrong_header_rejected_on_line_one():
    with pytest.raises(SchemaError) as exc:
        rec.parse_cvr_export(text("cvr,scanner\n"))
    assert exc.value.line == 1


def test_ragged_row_rejected():
    with pytest.raises(SchemaError) as exc:
        rec.parse_audit_spreadsheet(text("county,batch_name,trump,biden,jorgensen\nA,b,1,2\n"))
    assert exc.value.line == 2


# ---------------------------------------------------------- batch sheets

def test_table1_row1():
    src = ABBS_HEAD + "4 at 162,3,48,absentee,4,93,2,0,0,0\n"
    [s] = rec.parse_batch_sheets(text(src))
    assert s == BatchSheet("4 at 162", "3", "48", VotingMode.ABSENTEE_BY_MAIL, TallyVector(4, 93, 2, 0, 0, 0))


def test_table1_row11_unknown_write_in():
    src = ABBS_HEAD + "3 at 270,Chastain,114,advance,613,605,24,?,4,0\n"
    [s] = rec.parse_batch_sheets(text(src))
    assert s.tally.write_in is None
    assert s.tally.unknown_fields == {"write_in"}


def test_blank_cells_are_unknown_not_zero():
    src = ABBS_HEAD + "1 at 1,3,12--14,?,12,,1,,0,0\n"
    [s] = rec.parse_batch_sheets(text(src))
    assert s.mode is VotingMode.UNKNOWN
    assert s.tally.biden is None and s.tally.write_in is None
    assert s.batch_label == "12--14"


def test_batch_sheets_header_only():
    assert rec.parse_batch_sheets(text(ABBS_HEAD)) == []


def test_negative_count_is_validation_error():
    with pytest.raises(ValidationError) as exc:
        rec.parse_batch_sheets(text(ABBS_HEAD + "1 at 1,3,48,absentee,-4,93,2,0,0,0\n"))
    assert (exc.value.line, exc.value.column) == (2, "trump")


def test_empty_batch_label_rejected():
    with pytest.raises(ValidationError):
        rec.parse_batch_sheets(text(ABBS_HEAD + "1 at 1,3,,absentee,4,93,2,0,0,0\n"))


# ---------------------------------------------------------- other files

def test_precinct_results_row():
    [r] = rec.parse_precinct_results(text("phase,precinct,mode,candidate,votes\n"
                                          "original,RW01,election_day,Trump,193\n"))
    assert r == PrecinctModeTally("original", "RW01", VotingMode.ELECTION_DAY, "Trump", 193)


def test_precinct_results_duplicate_key_rejected():
    src = "phase,precinct,mode,candidate,votes\noriginal,RW01,advance,Trump,1\noriginal,RW01,advance,Trump,2\n"
    with pytest.raises(SchemaError):
        rec.parse_precinct_results(text(src))


def test_manifest_total():
    m = rec.parse_manifest(text("container_id,location,num_cards\nA,w,50\nB,w,50\n"))
    assert m.total_cards == 100


def test_manifest_duplicate_container_rejected():
    with pytest.raises(SchemaError):
        rec.parse_manifest(text("container_id,location,num_cards\nA,w,50\nA,w,50\n"))


def test_audit_row_from_footnote():
    [r] = rec.parse_audit_spreadsheet(text("county,batch_name,trump,biden,jorgensen\n"
                                           "Fulton,Absentee Scanner 2 Batch 400,6,92,0\n"))
    assert r == AuditRow("Fulton", "Absentee Scanner 2 Batch 400", 6, 92, 0)


def test_pollbook_duplicate_rejected():
    with pytest.raises(SchemaError):
        rec.parse_pollbook(text("precinct,mode,num_participants\nP,advance,1\nP,advance,2\n"))


def test_image_inventory_error_line():
    with pytest.raises(ParseError) as exc:
        rec.parse_image_inventory(text("00001_00001_000001\nnope\n"))
    assert exc.value.line == 2


def test_sum_tallies_flags_unknown():
    total = rec.sum_tallies([TallyVector(1, 2, 3, 4, 5, 6), TallyVector(1, 1, 1, None, 0, 0)])
    assert total.totals["write_in"] == 4
    assert total.value("write_in") is None
    assert total.value("trump") == 2
    assert total.is_partial


def test_candidate_total_skips_unknown():
    assert TallyVector(1, 2, None, 4, 9, 9).candidate_total == 7


# ------------------------------------------------------ round trip suites

names = st.text(alphabet=st.characters(blacklist_categories=("Cs", "Cc")), max_size=12)
nonblank = names.filter(lambda s: s.strip() != "")
counts = st.integers(0, 10 ** 6)
opt_counts = st.one_of(st.none(), counts)
modes = st.sampled_from(list(VotingMode))


@st.composite
def cvr_lists(draw):
    n = draw(st.integers(0, 8))
    ids = draw(st.lists(st.text("abcdef0123456789-", min_size=1, max_size=8), min_size=n, max_size=n,
                        unique=True))
    out = []
    for cid in ids:
        contests = draw(st.lists(st.text("ABCDEFGH", min_size=1, max_size=4), min_size=1, max_size=4,
                                 unique=True))
        sel = {c: draw(st.sampled_from(["", "TRUMP", "BIDEN", rec.WRITE_IN, rec.OVERVOTE])) for c in contests}
        wi = {c: draw(nonblank) for c in contests if sel[c] == rec.WRITE_IN and draw(st.booleans())}
        img = ImageRef.of(draw(st.integers(0, 99999)), draw(st.integers(0, 99999)), draw(st.integers(0, 999999)))
        out.append(CastVoteRecord(cid, img, draw(modes), draw(names), sel, wi))
    return out


@settings(max_examples=200, deadline=None)
@given(cvr_lists())
def test_cvr_round_trip_property(cvrs):
    out = rec.to_text(rec.serialize_cvr_export, cvrs)
    back = rec.parse_cvr_export(text(out))
    assert back == cvrs
    assert rec.to_text(rec.serialize_cvr_export, back) == out


@settings(max_examples=200, deadline=None)
@given(st.lists(st.builds(BatchSheet, names, names, nonblank, modes,
                          st.builds(TallyVector, opt_counts, opt_counts, opt_counts, opt_counts,
                                    opt_counts, opt_counts)), max_size=8))
def test_batch_sheet_round_trip_property(sheets):
    back = rec.parse_batch_sheets(text(rec.to_text(rec.serialize_batch_sheets, sheets)))
    assert back == sheets


@settings(max_examples=200, deadline=None)
@given(st.lists(st.builds(AuditRow, names, names, counts, counts, counts), max_size=8))
def test_audit_row_round_trip_property(rows):
    assert rec.parse_audit_spreadsheet(text(rec.to_text(rec.serialize_audit_spreadsheet, rows))) == rows


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(nonblank, names, counts), max_size=8, unique_by=lambda t: t[0]))
def test_manifest_round_trip_property(entries):
    m = Manifest(tuple(ManifestEntry(*e) for e in entries))
    assert rec.parse_manifest(text(rec.to_text(rec.serialize_manifest, m))) == m


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(names, modes, counts), max_size=8, unique_by=lambda t: (t[0], t[1])))
def test_pollbook_round_trip_property(entries):
    pb = [PollbookSummary(*e) for e in entries]
    assert rec.parse_pollbook(text(rec.to_text(rec.serialize_pollbook, pb))) == pb


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.sampled_from(rec.PHASES), names, modes, names, counts), max_size=8,
                unique_by=lambda t: t[:4]))
def test_results_round_trip_property(entries):
    res = [PrecinctModeTally(*e) for e in entries]
    assert rec.parse_precinct_results(text(rec.to_text(rec.serialize_precinct_results, res))) == res


@settings(max_examples=100, deadline=None)
@given(st.dictionaries(st.text("abc123", min_size=1, max_size=4),
                       st.lists(st.builds(ImageRef.of, st.integers(0, 99999), st.integers(0, 99999),
                                          st.integers(0, 999999)), min_size=1, max_size=4), max_size=5))
def test_claimed_groups_round_trip_property(groups):
    assert rec.parse_claimed_groups(text(rec.to_text(rec.serialize_claimed_groups, groups))) == groups


@settings(max_examples=100, deadline=None)
@given(st.lists(st.builds(ImageRef.of, st.integers(0, 99999), st.integers(0, 99999), st.integers(0, 999999)),
                max_size=10))
def test_image_inventory_round_trip_property(refs):
    assert rec.parse_image_inventory(text(rec.to_text(rec.serialize_image_inventory, refs))) == refs


def random_records(rng: random.Random, n: int) -> dict:
    """``n`` random records of every type, for the bulk round trip."""
    def word():
        return "".join(rng.choice("abcXYZ ,\"'é-12") for _ in range(rng.randint(1, 8))).strip() or "w"

    def opt():
        return None if rng.random() < 0.2 else rng.randint(0, 5000)

    cvrs = []
    for k in range(n):
        sel = {c: rng.choice(["", "TRUMP", "BIDEN", rec.WRITE_IN, rec.OVERVOTE])
               for c in rng.sample(["PRES", "SEN", "DA", "CLERK"], rng.randint(1, 4))}
        wi = {c: word() for c, v in sel.items() if v == rec.WRITE_IN and rng.random() < 0.7}
        cvrs.append(CastVoteRecord(f"cvr-{k}", ImageRef.of(rng.randint(0, 99999), rng.randint(0, 99999),
                                                           rng.randint(0, 999999)),
                                   rng.choice(list(VotingMode)), word(), sel, wi))
    return {
        "cvr": cvrs,
        "sheets": [BatchSheet(word(), word(), word(), rng.choice(list(VotingMode)),
                              TallyVector(*(opt() for _ in range(6)))) for _ in range(n)],
        "rows": [AuditRow(word(), word(), rng.randint(0, 999), rng.randint(0, 999), rng.randint(0, 99))
                 for _ in range(n)],
        "manifest": Manifest(tuple(ManifestEntry(f"box-{k}", word(), rng.randint(0, 500)) for k in range(n))),
        "pollbook": [PollbookSummary(f"P{k}", rng.choice(list(VotingMode)), rng.randint(0, 900))
                     for k in range(n)],
        "results": [PrecinctModeTally(rng.choice(rec.PHASES), f"P{k}", rng.choice(list(VotingMode)), word(),
                                      rng.randint(0, 900)) for k in range(n)],
        "images": [c.image for c in cvrs],
        "claimed": {str(k): [cvrs[k].image, cvrs[(k + 1) % n].image] for k in range(n)},
    }


PAIRS = {
    "cvr": (rec.serialize_cvr_export, rec.parse_cvr_export),
    "sheets": (rec.serialize_batch_sheets, rec.parse_batch_sheets),
    "rows": (rec.serialize_audit_spreadsheet, rec.parse_audit_spreadsheet),
    "manifest": (rec.serialize_manifest, rec.parse_manifest),
    "pollbook": (rec.serialize_pollbook, rec.parse_pollbook),
    "results": (rec.serialize_precinct_results, rec.parse_precinct_results),
    "images": (rec.serialize_image_inventory, rec.parse_image_inventory),
    "claimed": (rec.serialize_claimed_groups, rec.parse_claimed_groups),
}


def round_trip_failures(n: int = 1000, seed: int = 11) -> list[str]:
    data = random_records(random.Random(seed), n)
    bad = []
    for name, (write, read) in PAIRS.items():
        out = rec.to_text(write, data[name])
        back = read(text(out))
        if back != data[name] or rec.to_text(write, back) != out:
            bad.append(name)
    return bad


def test_bulk_round_trip_every_format():
    assert round_trip_failures() == []


def test_round_trip_through_files(tmp_path):
    data = random_records(random.Random(3), 50)
    for name, (write, read) in PAIRS.items():
        path = tmp_path / f"{name}.csv"
        write(data[name], path)
        assert read(path) == data[name]
