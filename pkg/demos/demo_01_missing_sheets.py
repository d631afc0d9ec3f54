"""
Finding hand-tally sheets that never reached the audit totals
=============================================================

A county hand count leaves two records: the handwritten batch sheets filled in by
the audit boards, and the spreadsheet of batch totals that was summed into
the reported result.  Every sheet should appear in the spreadsheet once.
"""

from __future__ import annotations

from canvasskit import audit_reconcile as ar
from canvasskit import fixtures as fx

# Desk-scale Fulton records: 1,927 sheets against 1,916 spreadsheet rows.
ds = fx.build_dataset(fx.preset("paper-fulton-desk"))
print(f"{len(ds.sheets):,} batch sheets, {len(ds.audit_rows):,} spreadsheet rows")

# Labels are free text ("Absentee Scanner 2 Batch 400", "3 12--14"), so they
# are reduced to comparable tokens first.
print(ar.normalize_batch_id("Absentee Scanner 2 Batch 400"), ar.normalize_batch_id("3 12--14"))

# Pass 1 pairs label and counts; pass 2 pairs counts alone when exactly one
# sheet and one row are left holding them.
result = ar.match_sheets(ds.sheets, ds.audit_rows)
via = {}
for m in result.matched:
    via[m.via] = via.get(m.via, 0) + 1
print("matched:", via, " missing:", len(result.missing_sheets), " ambiguous:", len(result.ambiguous))

for s in result.missing_sheets:
    t = s.tally
    print(f"  {s.source_page:>9}  {s.location_or_scanner or '-':>8} {s.batch_label:>9}  "
          f"T {t.trump:>4}  B {t.biden:>4}  J {t.jorgensen:>3}")

# Three of the missing sheets share their counts with a row filed under a
# different batch name.  That row already belongs to a genuine sheet, so the
# coincidence is reported rather than used as a match.
for i, hits in result.tally_collisions.items():
    print(f"  {ds.sheets[i].source_page} has the same counts as row {hits[0].row.batch_name!r}")

# What the omission did to the totals.  One sheet left write-ins blank, so the
# write-in deficit is unknown rather than zero.
impact = ar.omission_impact(result.missing_sheets)
print(f"omitted votes: Trump {impact.trump:,}, Biden {impact.biden:,}, Jorgensen {impact.jorgensen:,}; "
      f"total {impact.total_known:,}; write-ins {'unknown' if impact.write_in_deficit is None else impact.write_in_deficit}")

# Expressed against the originally reported three-candidate total.
for votes in (634, impact.total_known, 4569):
    print(f"  {votes:>5,} / 524,659 = {ar.discrepancy_rate(votes, 524659)}%")
