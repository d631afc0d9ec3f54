from __future__ import annotations

import copy
import json
from collections import Counter

import pytest

from canvasskit import audit_reconcile as ar
from canvasskit import canvass as cv
from canvasskit import cli
from canvasskit import dup_forensics as df
from canvasskit import fixtures as fx
from canvasskit.records import ImageRef


def tree_bytes(root) -> dict:
    return {str(p.relative_to(root)): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


def test_identical_spec_gives_identical_bytes(tmp_path):
    spec = fx.random_small_spec(17)
    fx.generate(spec, tmp_path / "a")
    fx.generate(copy.deepcopy(spec), tmp_path / "b")
    a, b = tree_bytes(tmp_path / "a"), tree_bytes(tmp_path / "b")
    assert a == b and "ground_truth.json" in a and "original/cvr.csv" in a


def test_desk_preset_is_byte_deterministic(tmp_path, desk_dir):
    fx.generate(fx.preset("paper-fulton-desk"), tmp_path)
    assert tree_bytes(tmp_path) == tree_bytes(desk_dir)


def test_different_seed_changes_data(tmp_path):
    spec = fx.random_small_spec(3)
    fx.generate(spec, tmp_path / "a")
    fx.generate(fx.with_seed(spec, 4), tmp_path / "b")
    assert tree_bytes(tmp_path / "a")["original/cvr.csv"] != tree_bytes(tmp_path / "b")["original/cvr.csv"]


def test_clean_preset_has_zero_findings(clean_dir, capsys):
    assert cli.run(["report-all", str(clean_dir)]) == cli.EXIT_CLEAN
    report = json.loads(capsys.readouterr().out)
    assert report["findings"] == [] and report["finding_count"] == 0


def test_read_dataset_round_trip(desk, desk_dir):
    back = fx.read_dataset(desk_dir)
    assert back.sheets == desk.sheets and back.audit_rows == desk.audit_rows
    assert back.results == desk.results
    for name, phase in desk.phases.items():
        assert back.phases[name].cvrs == phase.cvrs
        assert back.phases[name].images == phase.images
        assert back.phases[name].claimed_groups == phase.claimed_groups
    assert back.ground_truth == json.loads(json.dumps(desk.ground_truth))


def test_read_dataset_requires_directory(tmp_path):
    with pytest.raises(FileNotFoundError):
        fx.read_dataset(tmp_path / "nope")


def test_desk_preset_targets(desk):
    truth = desk.ground_truth["phases"]
    assert truth["original"]["cvr_count"] - truth["recount"]["cvr_count"] == 851
    for phase, data in desk.phases.items():
        assert len(data.cvrs) == truth[phase]["cvr_count"]
        assert len(data.images) == truth[phase]["image_count"]
        assert +cv.tally_cvrs(data.cvrs, fx.PRES) == +Counter(truth[phase]["pres_tally"])


# ------------------------------------------------------ generation errors

def small_spec() -> dict:
    return {"spec_version": 1, "seed": 1, "phases": {"original": {
        "cvr_count": 100,
        "batches": [{"scanner": 1, "batch": 1, "size": 20}, {"scanner": 1, "batch": 2, "size": 20}],
        "runs": [{"a": [1, 1], "b": [1, 2], "start_a": 1, "start_b": 1, "length": 12, "orientation": "same"}],
        "background": {"scanners": [2], "batch_size": 20}}}}


def test_small_spec_builds():
    ds = fx.build_dataset(small_spec())
    groups = df.detect_sequence_runs(df.batch_sequences(ds.phases["original"].cvrs))
    assert sorted(sorted(str(m) for m in g.members) for g in groups) == \
        sorted(ds.ground_truth["phases"]["original"]["expected_sequence_groups"])


@pytest.mark.parametrize("mutate,needle", [
    (lambda s: s["phases"]["original"]["runs"][0].update(length=30), "does not fit"),
    (lambda s: s["phases"]["original"]["runs"][0].update(orientation="sideways"), "orientation"),
    (lambda s: s["phases"]["original"]["runs"][0].update(b=[1, 1]), "two different batches"),
    (lambda s: s["phases"]["original"]["runs"][0].update(b=[7, 7]), "not declared"),
    (lambda s: s["phases"]["original"].update(cvr_count=30), "cvr_count"),
    (lambda s: s["phases"]["original"].update(missing_batches=[[9, 9]]), "not declared"),
    (lambda s: s["phases"]["original"].update(explicit_multiples=[["00001_00001_000001"]]), "two distinct"),
    (lambda s: s["phases"]["original"].update(pres_tally={"TRUMP": 1}), "pres_tally"),
    (lambda s: s["phases"].update(primary={"cvr_count": 1}), "unknown phase"),
    (lambda s: s.pop("seed"), "seed"),
    (lambda s: s.update(spec_version=99), "spec_version"),
])
def test_unachievable_specs_name_the_constraint(mutate, needle):
    spec = small_spec()
    mutate(spec)
    with pytest.raises(fx.GenerationError, match=needle):
        fx.build_dataset(spec)


def test_audit_errors_name_the_constraint():
    spec = {"spec_version": 1, "seed": 1, "audit": {"counties": [
        {"name": "X", "rows": 3, "sheets": True, "duplicate_groups": [2, 2]}]}}
    with pytest.raises(fx.GenerationError, match="exceed"):
        fx.build_dataset(spec)
    spec["audit"]["counties"][0]["duplicate_groups"] = [1]
    with pytest.raises(fx.GenerationError, match="at least 2"):
        fx.build_dataset(spec)


def test_unknown_preset():
    with pytest.raises(fx.GenerationError, match="unknown preset"):
        fx.preset("nowhere")


# --------------------------------------------------------------- closure

def groups_as_text(groups) -> list:
    return sorted(sorted(str(m) for m in g.members) for g in groups)


@pytest.mark.parametrize("seed", range(200))
def test_random_spec_findings_match_ground_truth(seed):
    ds = fx.build_dataset(fx.random_small_spec(seed))
    truth = ds.ground_truth["phases"]["original"]
    ph = ds.phases["original"]

    found = df.detect_sequence_runs(df.batch_sequences(ph.cvrs))
    assert groups_as_text(found) == sorted(truth["expected_sequence_groups"])
    verified = df.detect_explicit_multiples(ph.claimed_groups, ph.cvrs)
    assert not verified.failures
    assert groups_as_text(verified.groups) == sorted(truth["expected_explicit_groups"])
    adjusted = cv.dedup_adjusted_tally(ph.cvrs, found + verified.groups, fx.PRES).adjusted
    assert +adjusted == +Counter(truth["detectable_dedup_pres_tally"])

    ledger = cv.count_reconciliation({"original": ph.cvrs}, {"original": ph.images})
    assert len(ledger.missing_image_refs["original"]) == truth["missing_image_count"]
    assert [list(b) for b in ledger.missing_batches["original"]] == truth["missing_batches"]

    county = ds.ground_truth["audit"]["counties"]["Testing"]
    match = ar.match_sheets(ds.sheets, ds.audit_rows)
    assert [s.source_page for s in match.missing_sheets] == county["missing_sheet_pages"]
    assert not match.ambiguous and not match.unmatched_rows
    assert ar.duplicate_row_census(ds.audit_rows).count == county["duplicate_row_count"]
    assert ar.audit_totals(ds.audit_rows) == county["totals"]


def test_statewide_preset_counts():
    truth = fx.build_dataset(fx.preset("paper-statewide-audit")).ground_truth
    assert truth["audit"]["duplicate_row_count"] == 16807


def test_explicit_pairs_reference_generated_images(desk):
    refs = {c.image for c in desk.phases["original"].cvrs}
    for members in desk.phases["original"].claimed_groups.values():
        assert all(isinstance(m, ImageRef) and m in refs for m in members)
