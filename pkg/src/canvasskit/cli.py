"""Command-line front end.

Every subcommand builds a JSON report (``schema_version``, the run
configuration, per-check sections and a flat ``findings`` list) and prints it
as JSON or as text rendered from that same JSON.  Exit status: 0 when the
checks ran and found nothing, 1 when they found discrepancies, 2 on usage,
missing-file or parse errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from collections import Counter
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import audit_reconcile as ar
from . import canvass as cv
from . import dup_forensics as df
from . import fixtures as fx
from . import records as rec

SCHEMA_VERSION = 1
SEED_ENV = "CANVASS_SEED"
DEFAULT_SEED = 0
DEFAULT_SAMPLE = 100

EXIT_CLEAN, EXIT_FINDINGS, EXIT_ERROR = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    inputs: dict = field(default_factory=dict)
    min_run: int = df.DEFAULT_MIN_RUN
    confidence: str = "0.95"
    seed: int = DEFAULT_SEED
    seed_source: str = "default"
    rare_threshold: int = df.DEFAULT_RARE_THRESHOLD
    sample_size: int = DEFAULT_SAMPLE
    output_format: str = "json"

    @property
    def confidence_value(self) -> Fraction:
        return Fraction(self.confidence)


def _report(config: RunConfig, sections: dict, findings: list[dict]) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "tool": "canvasskit",
        "command": config.subcommand,
        "config": asdict(config),
        "sections": sections,
        "finding_count": len(findings),
        "findings": findings,
    }


# ------------------------------------------------------------------ checks

def reconcile_section(sheets, rows, original_total: Optional[int] = None) -> tuple[dict, list]:
    result = ar.match_sheets(sheets, rows)
    impact = ar.omission_impact(result.missing_sheets)
    totals = ar.audit_totals(rows)
    census = ar.duplicate_row_census(rows)
    findings = []
    for s in result.missing_sheets:
        t = s.tally
        findings.append({
            "check": "reconcile-audit", "kind": "missing_sheet", "source_page": s.source_page,
            "location_or_scanner": s.location_or_scanner, "batch_label": s.batch_label,
            "mode": s.mode.value, "tally": {k: getattr(t, k) for k in rec.TALLY_FIELDS},
            "message": f"batch sheet {s.source_page} ({s.location_or_scanner or '-'} / {s.batch_label}, "
                       f"{t.trump}/{t.biden}/{t.jorgensen}) has no row in the audit spreadsheet",
        })
    for s, cands in result.ambiguous:
        findings.append({
            "check": "reconcile-audit", "kind": "ambiguous_sheet", "source_page": s.source_page,
            "batch_label": s.batch_label, "candidate_rows": [r.batch_name for r in cands],
            "message": f"batch sheet {s.source_page} ({s.batch_label}) matches {len(cands)} rows "
                       "on counts alone; not paired",
        })
    for r in result.unmatched_rows:
        findings.append({
            "check": "reconcile-audit", "kind": "unmatched_row", "county": r.county,
            "batch_name": r.batch_name, "tally": list(r.tally),
            "message": f"audit row {r.county} / {r.batch_name!r} matches no batch sheet",
        })
    section = {
        "sheets": len(sheets),
        "rows": len(rows),
        "matched": len(result.matched),
        "matched_by": dict(sorted(Counter(m.via for m in result.matched).items())),
        "tally_only_matches": [
            {"source_page": m.sheet.source_page, "sheet_key": list(m.sheet_key),
             "row": m.row.batch_name, "row_key": list(m.row_key)}
            for m in result.matched if m.via == "tally"],
        "missing_sheets": [s.source_page for s in result.missing_sheets],
        "ambiguous_sheets": [s.source_page for s, _ in result.ambiguous],
        "unmatched_rows": len(result.unmatched_rows),
        "count_collisions": [
            {"source_page": sheets[i].source_page, "rows": [h.row.batch_name for h in hits]}
            for i, hits in sorted(result.tally_collisions.items())],
        "omission_impact": {
            "trump": impact.trump, "biden": impact.biden, "jorgensen": impact.jorgensen,
            "total_known": impact.total_known, "write_in_deficit": impact.write_in_deficit,
            "write_in_known": impact.write_in_known, "unknown_fields": sorted(impact.unknown_fields),
        },
        "audit_totals": totals,
        "audit_total_votes": sum(totals.values()),
        "duplicate_row_census": {"rows": census.count, "groups": len(census.groups)},
    }
    if original_total:
        apparent = abs(sum(totals.values()) - original_total)
        with_missing = apparent + impact.total_known
        section["discrepancy"] = {
            "original_total": original_total,
            "apparent_error_votes": apparent,
            "apparent_rate_percent": str(ar.discrepancy_rate(apparent, original_total)),
            "with_missing_sheets_votes": with_missing,
            "with_missing_sheets_rate_percent": str(ar.discrepancy_rate(with_missing, original_total)),
        }
    return section, findings


def duplicates_section(cvrs, phase: str, config: RunConfig) -> tuple[dict, list, list]:
    seqs = df.batch_sequences(cvrs)
    runs = df.find_aligned_runs(seqs, config.min_run)
    groups = df.detect_sequence_runs(seqs, config.min_run, config.rare_threshold, runs=runs)
    findings = [{
        "check": "detect-duplicates", "kind": "sequence_duplicate", "phase": phase, **g.as_dict(),
        "message": f"{phase}: {len(g.members)} scans of one sheet "
                   f"({', '.join(str(m) for m in g.members)}); {g.orientation} run of {g.run_length}",
    } for g in groups]
    section = {
        "batches": len(seqs),
        "cvrs": len(cvrs),
        "runs": [{"batch_a": list(r.batch_a), "batch_b": list(r.batch_b),
                  "start_a": r.start_a + 1, "start_b": r.start_b + 1, "length": r.length,
                  "orientation": r.orientation} for r in runs],
        "groups": [g.as_dict() for g in groups],
        "sheets_in_groups": sum(len(g.members) for g in groups),
        "distinct_sheets": len(groups),
    }
    return section, findings, groups


def verify_section(claimed, cvrs, phase: str, config: RunConfig) -> tuple[dict, list, list]:
    ver = df.detect_explicit_multiples(claimed, cvrs)
    findings = [{
        "check": "verify-groups", "kind": "verified_multiple", "phase": phase, "group_id": gid,
        "members": [str(m) for m in g.members],
        "message": f"{phase}: claimed group {gid} verified, {len(g.members)} CVRs for one sheet",
    } for gid, g in ver.verified]
    section = {
        "claimed": len(claimed),
        "verified": len(ver.verified),
        "claimed_refs": sum(len(set(m)) for m in claimed.values()),
        "referenced_refs_found": ver.referenced,
        "verified_groups": [{"group_id": gid, "members": [str(m) for m in g.members]}
                            for gid, g in ver.verified],
        "failures": [{"group_id": f.group_id, "reason": f.reason, "refs": [str(r) for r in f.refs]}
                     for f in ver.failures],
    }
    if claimed:
        ids = list(claimed)
        n = min(config.sample_size, len(ids))
        draw = df.sample_verification(ids, n, config.seed)
        ok = {gid for gid, _ in ver.verified}
        k = sum(1 for gid in draw.items if gid in ok)
        bound = df.hypergeometric_lcb(len(ids), n, k, config.confidence_value)
        section["sample"] = {"seed": config.seed, "size": n, "group_ids": list(draw.items),
                             "verified_in_sample": k}
        section["confidence_bound"] = bound.as_dict()
    return section, findings, ver.groups


def account_section(ds: fx.Dataset) -> tuple[dict, list]:
    ledger = cv.count_reconciliation(
        {p: ph.cvrs for p, ph in ds.phases.items()},
        {p: ph.images for p, ph in ds.phases.items() if ph.images is not None},
        ds.manifest, ds.pollbook, ds.reported_missing_images)
    findings = [{"check": "account", **f} for f in ledger.findings()]
    return ledger.as_dict(), findings


def compare_section(results) -> tuple[dict, list]:
    deltas = cv.phase_compare(results)
    findings = []
    for d in deltas:
        diffs = d.as_dict()["differences"]
        nonzero = {k: v for k, v in diffs.items() if v}
        if nonzero:
            parts = ", ".join(f"{k} {v:+d}" for k, v in nonzero.items())
            findings.append({
                "check": "compare-phases", "kind": "phase_delta", "precinct": d.precinct,
                "mode": d.mode.value, "candidate": d.candidate, "differences": nonzero,
                "message": f"{d.precinct} {d.mode.value} {d.candidate}: {parts}",
            })
    table: dict = {}
    for r in results:
        table.setdefault(r.precinct, {}).setdefault(r.phase, {}).setdefault(r.mode.value, {})[r.candidate] = r.votes
    return {"deltas": [d.as_dict() for d in deltas], "table": table}, findings


def dedup_section(cvrs, groups) -> dict:
    raw = cv.tally_cvrs(cvrs, fx.PRES)
    adj = cv.dedup_adjusted_tally(cvrs, groups, fx.PRES)
    return {
        "contest": fx.PRES,
        "reported": dict(sorted(raw.items())),
        "adjusted": dict(sorted(adj.adjusted.items())),
        "removed": dict(sorted(adj.removed.items())),
        "rejected_groups": [{"members": [str(m) for m in g.members], "reason": why}
                            for g, why in adj.rejected],
    }


def _merge_groups(groups) -> list:
    seen, out = set(), []
    for g in groups:
        if g.members not in seen:
            seen.add(g.members)
            out.append(g)
    return out


# ---------------------------------------------------------------- commands

def _dataset(args) -> fx.Dataset:
    if args.data is None:
        return fx.Dataset()
    return fx.read_dataset(args.data)


def _phases(ds: fx.Dataset, wanted: Optional[str]) -> list[str]:
    if wanted:
        if wanted not in ds.phases:
            raise UsageError(f"phase {wanted!r} has no cvr.csv in the data directory")
        return [wanted]
    return list(ds.phases)


def cmd_reconcile(args, config):
    if not (args.sheets or args.data) or not (args.rows or args.data):
        raise UsageError("reconcile-audit needs --data or both --sheets and --rows")
    ds = _dataset(args)
    sheets = rec.parse_batch_sheets(args.sheets) if args.sheets else ds.sheets
    rows = rec.parse_audit_spreadsheet(args.rows) if args.rows else ds.audit_rows
    section, findings = reconcile_section(sheets, rows, args.original_total)
    return {"reconcile_audit": section}, findings


def _cvr_sets(args) -> dict[str, fx.PhaseData]:
    if args.cvr:
        return {args.phase or "original": fx.PhaseData(rec.parse_cvr_export(args.cvr), None,
                                                       rec.parse_claimed_groups(args.claimed)
                                                       if getattr(args, "claimed", None) else {})}
    if args.data is None:
        raise UsageError("give --data or --cvr")
    ds = fx.read_dataset(args.data)
    return {p: ds.phases[p] for p in _phases(ds, args.phase)}


def cmd_detect(args, config):
    sections, findings = {}, []
    for phase, data in _cvr_sets(args).items():
        sec, f, _ = duplicates_section(data.cvrs, phase, config)
        sections[phase] = sec
        findings += f
    return {"detect_duplicates": sections}, findings


def cmd_verify(args, config):
    sections, findings = {}, []
    for phase, data in _cvr_sets(args).items():
        sec, f, _ = verify_section(data.claimed_groups, data.cvrs, phase, config)
        sections[phase] = sec
        findings += f
    return {"verify_groups": sections}, findings


def _keyed(values, what) -> dict[str, str]:
    out = {}
    for v in values or []:
        phase, sep, rest = v.partition("=")
        if not sep or phase not in rec.PHASES:
            raise UsageError(f"{what} expects PHASE=VALUE with PHASE one of {', '.join(rec.PHASES)}")
        out[phase] = rest
    return out


def cmd_account(args, config):
    ds = _dataset(args)
    for phase, path in _keyed(args.cvr, "--cvr").items():
        ds.phases[phase] = fx.PhaseData(rec.parse_cvr_export(path), None)
    for phase, path in _keyed(args.images, "--images").items():
        if phase not in ds.phases:
            raise UsageError(f"--images {phase}=... given without CVRs for {phase}")
        ds.phases[phase].images = rec.parse_image_inventory(path)
    if args.manifest:
        ds.manifest = rec.parse_manifest(args.manifest)
    if args.pollbook:
        ds.pollbook = rec.parse_pollbook(args.pollbook)
    for phase, n in _keyed(args.reported_missing, "--reported-missing").items():
        ds.reported_missing_images[phase] = int(n)
    if not ds.phases:
        raise UsageError("account needs --data or at least one --cvr PHASE=FILE")
    section, findings = account_section(ds)
    return {"account": section}, findings


def cmd_compare(args, config):
    if args.results:
        results = rec.parse_precinct_results(args.results)
    elif args.data:
        results = _dataset(args).results
    else:
        raise UsageError("compare-phases needs --data or --results")
    section, findings = compare_section(results)
    return {"compare_phases": section}, findings


def cmd_lcb(args, config):
    try:
        bound = df.hypergeometric_lcb(args.population, args.sample, args.agreements,
                                      config.confidence_value)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return {"lcb": bound.as_dict()}, []


def cmd_generate(args, config):
    if bool(args.preset) == bool(args.spec):
        raise UsageError("generate-fixture needs exactly one of --preset or --spec")
    spec = fx.preset(args.preset) if args.preset else fx.load_spec(args.spec)
    if config.seed_source != "default":
        spec = fx.with_seed(spec, config.seed)
    truth = fx.generate(spec, args.out)
    summary = {"name": spec.get("name", ""), "seed": spec["seed"], "out": str(args.out),
               "phases": {p: {"cvr_count": t["cvr_count"], "image_count": t["image_count"],
                              "duplicate_sheet_count": t["duplicate_sheet_count"]}
                          for p, t in truth["phases"].items()}}
    return {"generate_fixture": summary}, []


def cmd_report_all(args, config):
    ds = fx.read_dataset(args.data)
    sections: dict = {}
    findings: list = []
    if ds.sheets or ds.audit_rows:
        original_total = args.original_total or ds.reported_candidate_totals.get("original")
        sec, f = reconcile_section(ds.sheets, ds.audit_rows, original_total)
        sections["reconcile_audit"] = sec
        findings += f
    if ds.phases:
        sec, f = account_section(ds)
        sections["account"] = sec
        findings += f
    dup_sections, ver_sections, dedup = {}, {}, {}
    for phase, data in ds.phases.items():
        sec, f, seq_groups = duplicates_section(data.cvrs, phase, config)
        dup_sections[phase] = sec
        findings += f
        vsec, vf, ver_groups = verify_section(data.claimed_groups, data.cvrs, phase, config)
        ver_sections[phase] = vsec
        findings += vf
        dedup[phase] = dedup_section(data.cvrs, _merge_groups(seq_groups + ver_groups))
    if ds.phases:
        sections["detect_duplicates"] = dup_sections
        sections["verify_groups"] = ver_sections
        sections["dedup_tally"] = dedup
    if ds.results:
        sec, f = compare_section(ds.results)
        sections["compare_phases"] = sec
        findings += f
    return sections, findings


# ------------------------------------------------------------------- text

def _fmt(v) -> str:
    if isinstance(v, bool) or v is None:
        return str(v)
    if isinstance(v, int):
        return f"{v:,}"
    return str(v)


def _phase_table(precinct: str, table: dict) -> list[str]:
    modes = [m.value for m in rec.VotingMode if m is not rec.VotingMode.UNKNOWN]
    cands: list[str] = []
    for by_mode in table.values():
        for votes in by_mode.values():
            for c in votes:
                if c not in cands:
                    cands.append(c)
    used = [m for m in modes if any(m in t for t in table.values())]
    width = 7
    head1 = f"{'':10}" + "".join(f"| {m:<{width * len(cands) - 1}}" for m in used)
    head2 = f"{'count':10}" + "".join("|" + "".join(f"{c[:width - 1]:>{width}}" for c in cands) for _ in used)
    lines = [f"precinct {precinct}", head1, head2]
    order = sorted(table, key=lambda p: rec.PHASES.index(p) if p in rec.PHASES else 99)
    for phase in order:
        row = f"{phase:10}"
        for m in used:
            votes = table[phase].get(m, {})
            row += "|" + "".join(f"{votes[c]:>{width}}" if c in votes else " " * width for c in cands)
        lines.append(row)
    return lines


def render_text(report: dict) -> str:
    """Plain-text view of a report; uses nothing but the report itself."""
    out = [f"canvasskit {report['command']} (report schema {report['schema_version']})"]
    cfg = report["config"]
    out.append("config: " + ", ".join(f"{k}={v}" for k, v in cfg.items() if k != "inputs"))
    for k, v in cfg["inputs"].items():
        out.append(f"  input {k}: {v}")
    for name, sec in report["sections"].items():
        out.append("")
        out.append(f"== {name} ==")
        if name == "compare_phases":
            for precinct, table in sec["table"].items():
                out.extend(_phase_table(precinct, table))
            for d in sec["deltas"]:
                diffs = ", ".join(f"{k} {v:+d}" for k, v in d["differences"].items())
                rel = ", ".join(f"{k} {v:+.2f}%" for k, v in d["relative_to_original_percent"].items())
                out.append(f"  {d['precinct']} {d['mode']} {d['candidate']}: {diffs}"
                           + (f" (vs original: {rel})" if rel else ""))
            continue
        out.extend(_render_mapping(sec, 1))
    out.append("")
    out.append(f"findings: {report['finding_count']}")
    for f in report["findings"]:
        out.append(f"  [{f['check']}/{f['kind']}] {f['message']}")
    return "\n".join(out) + "\n"


def _render_mapping(obj: dict, depth: int) -> list[str]:
    pad = "  " * depth
    lines = []
    for k, v in obj.items():
        if isinstance(v, dict):
            if v and all(not isinstance(x, (dict, list)) for x in v.values()):
                lines.append(f"{pad}{k}: " + ", ".join(f"{a}={_fmt(b)}" for a, b in v.items()))
            else:
                lines.append(f"{pad}{k}:")
                lines.extend(_render_mapping(v, depth + 1))
        elif isinstance(v, list):
            if len(v) > 12:
                lines.append(f"{pad}{k}: {len(v)} entries (first 12 shown)")
                v = v[:12]
            else:
                lines.append(f"{pad}{k}:" + ("" if v else " none"))
            for item in v:
                if isinstance(item, dict):
                    lines.append(f"{pad}  - " + ", ".join(f"{a}={_fmt(b)}" for a, b in item.items()))
                else:
                    lines.append(f"{pad}  - {_fmt(item)}")
        else:
            lines.append(f"{pad}{k}: {_fmt(v)}")
    return lines


# ------------------------------------------------------------------ parser

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("json", "text"), default="json", help="report format")
    p.add_argument("--output", "-o", help="write the report here instead of stdout")
    p.add_argument("--seed", type=int, help=f"sampling seed (default: ${SEED_ENV} or {DEFAULT_SEED})")
    p.add_argument("--min-run", type=int, default=df.DEFAULT_MIN_RUN,
                   help="shortest aligned run treated as a rescan (default %(default)s)")
    p.add_argument("--rare-threshold", type=int, default=df.DEFAULT_RARE_THRESHOLD,
                   help="write-in texts seen at most this often count as rare (default %(default)s)")
    p.add_argument("--confidence", default="0.95", help="confidence level (default %(default)s)")
    p.add_argument("--sample-size", type=int, default=DEFAULT_SAMPLE,
                   help="claimed groups to sample for the confidence bound (default %(default)s)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="canvasskit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reconcile-audit", help="match batch sheets to audit spreadsheet rows")
    p.add_argument("--data", help="dataset directory (abbs.csv, audit_rows.csv)")
    p.add_argument("--sheets", help="abbs.csv")
    p.add_argument("--rows", help="audit_rows.csv")
    p.add_argument("--original-total", type=int,
                   help="machine-count votes for the three candidates, to express error rates")
    p.set_defaults(func=cmd_reconcile)

    for name, func, helptext in (("detect-duplicates", cmd_detect, "find rescanned batch runs"),
                                 ("verify-groups", cmd_verify, "check claimed duplicate image groups")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--data", help="dataset directory with <phase>/cvr.csv")
        p.add_argument("--cvr", help="a single cvr.csv")
        if name == "verify-groups":
            p.add_argument("--claimed", help="claimed-groups.csv (with --cvr)")
        p.add_argument("--phase", choices=rec.PHASES, help="restrict to one count phase")
        p.set_defaults(func=func)

    p = sub.add_parser("account", help="compare CVR, image, manifest and pollbook counts")
    p.add_argument("--data", help="dataset directory")
    p.add_argument("--cvr", action="append", metavar="PHASE=FILE")
    p.add_argument("--images", action="append", metavar="PHASE=FILE")
    p.add_argument("--manifest")
    p.add_argument("--pollbook")
    p.add_argument("--reported-missing", action="append", metavar="PHASE=N",
                   help="officially reported count of missing images")
    p.set_defaults(func=cmd_account)

    p = sub.add_parser("compare-phases", help="precinct/mode tallies across count phases")
    p.add_argument("--data", help="dataset directory (results.csv)")
    p.add_argument("--results", help="results.csv")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("lcb", help="hypergeometric lower confidence bound")
    p.add_argument("--population", type=int, required=True)
    p.add_argument("--sample", type=int, required=True)
    p.add_argument("--agreements", type=int, required=True)
    p.set_defaults(func=cmd_lcb)

    p = sub.add_parser("generate-fixture", help="write a synthetic dataset")
    p.add_argument("--preset", help=f"one of: {', '.join(sorted(fx.PRESETS))}")
    p.add_argument("--spec", help="fixture-spec.json")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("report-all", help="run every check on a dataset directory")
    p.add_argument("data", help="dataset directory")
    p.add_argument("--original-total", type=int,
                   help="machine-count votes for the three candidates (default: reported.json)")
    p.set_defaults(func=cmd_report_all)

    for p in sub.choices.values():
        _add_common(p)
    return parser


def _config(args) -> RunConfig:
    if args.seed is not None:
        seed, source = args.seed, "flag"
    elif os.environ.get(SEED_ENV, "").strip():
        try:
            seed, source = int(os.environ[SEED_ENV]), "env"
        except ValueError:
            raise UsageError(f"{SEED_ENV} must be an integer") from None
    else:
        seed, source = DEFAULT_SEED, "default"
    try:
        conf = Fraction(args.confidence)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"--confidence must be a number, got {args.confidence!r}") from None
    if not 0 < conf < 1:
        raise UsageError("--confidence must lie strictly between 0 and 1")
    if args.min_run < 2:
        raise UsageError("--min-run must be at least 2")
    if args.sample_size < 0:
        raise UsageError("--sample-size must be non-negative")
    inputs = {k: str(getattr(args, k)) for k in ("data", "sheets", "rows", "cvr", "claimed", "images",
                                                  "manifest", "pollbook", "results", "spec", "preset",
                                                  "out", "phase", "population", "sample", "agreements",
                                                  "original_total", "reported_missing")
              if getattr(args, k, None) is not None}
    return RunConfig(args.command, inputs, args.min_run, args.confidence, seed, source,
                     args.rare_threshold, args.sample_size, args.format)


def run(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed usage
        return EXIT_CLEAN if exc.code == 0 else EXIT_ERROR
    try:
        config = _config(args)
        sections, findings = args.func(args, config)
    except (UsageError, fx.GenerationError) as exc:
        print(f"canvasskit: error: {exc}", file=stderr)
        return EXIT_ERROR
    except rec.ParseError as exc:
        print(f"canvasskit: parse error: {exc}", file=stderr)
        return EXIT_ERROR
    except (FileNotFoundError, IsADirectoryError, NotADirectoryError) as exc:
        print(f"canvasskit: error: {exc}", file=stderr)
        return EXIT_ERROR
    report = _report(config, sections, findings)
    if args.command == "lcb" and config.output_format == "text":
        text = f"{report['sections']['lcb']['lower_bound']}\n"
    elif config.output_format == "text":
        text = render_text(report)
    else:
        text = json.dumps(report, indent=2) + "\n"
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        stdout.write(text)
    return EXIT_FINDINGS if findings else EXIT_CLEAN


def main(argv: Optional[Sequence[str]] = None) -> int:
    return run(argv)


if __name__ == "__main__":
    raise SystemExit(main())
