"""
Do the books balance?
=====================

Before a result is certified, the number of cast vote records, the number of
stored ballot images, the physical ballot inventory and the number of voters
in the pollbooks should all agree, and repeated counts of the same precinct
should agree too.
"""

from __future__ import annotations

from canvasskit import canvass as cv
from canvasskit import fixtures as fx

ds = fx.build_dataset(fx.preset("paper-fulton-desk"))

ledger = cv.count_reconciliation({p: ph.cvrs for p, ph in ds.phases.items()},
                                 {p: ph.images for p, ph in ds.phases.items()},
                                 ds.manifest, ds.pollbook, ds.reported_missing_images)
print("CVRs per count:  ", ledger.cvr_count_by_phase)
print("images per count:", ledger.image_count_by_phase)
print("whole batches with no images:", ledger.missing_batches)
for f in ledger.findings():
    print("  -", f["message"])

# The same precinct across the original count, the recount and the hand
# audit.  The audit only reported election-day figures, so its other cells
# are absent rather than zero.
print()
for d in cv.phase_compare(ds.results):
    diffs = ", ".join(f"{a}-{b} {v:+d}" for (a, b), v in d.differences.items() if a < b)
    rel = d.relative_to_original("recount")
    pct = f"  recount vs original {float(rel) * 100:+.2f}%" if rel is not None else ""
    print(f"{d.precinct} {d.mode.value:>16} {d.candidate:>9}: {diffs}{pct}")
