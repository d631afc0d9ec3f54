"""
Sheets that were scanned more than once
=======================================

If a stack of ballots is fed through a scanner twice, two scan batches share
a long stretch of identical vote patterns, possibly with the stack turned
over.  A matching vote pattern on its own proves nothing, because many
ballots are marked identically; a long aligned run of them does, and a rare
write-in name inside the run settles it.
"""

from __future__ import annotations

from collections import Counter

from canvasskit import canvass as cv
from canvasskit import dup_forensics as df
from canvasskit import fixtures as fx

ds = fx.build_dataset(fx.preset("paper-fulton-desk"))
recount = ds.phases["recount"]

# Each batch becomes the ordered list of vote signatures of its sheets.
seqs = df.batch_sequences(recount.cvrs)
print(f"{len(seqs)} batches, {len(recount.cvrs):,} CVRs")

# Every maximal run of at least ten matching positions between two batches,
# read forwards and backwards.
runs = df.find_aligned_runs(seqs, min_run=10)
for r in runs:
    print(f"  {r.batch_a} ~ {r.batch_b}: {r.length} sheets, {r.orientation}")

# Positions aligned by the runs are merged, so a sheet scanned three times is
# one group of three.  Only positions whose signature occurs nowhere else in
# the data are kept: those are the provable duplicates.
groups = df.detect_sequence_runs(seqs, min_run=10, runs=runs)
sizes = Counter(len(g.members) for g in groups)
print(f"{len(groups)} provable groups; sizes {dict(sizes)}")
for g in groups[:4]:
    print("  ", ", ".join(str(m) for m in g.members), f"(run {g.run_length}, {g.orientation})")

# The claimed groups published for this count can be checked directly: every
# image must exist and all copies must carry the same votes.
claimed = df.detect_explicit_multiples(recount.claimed_groups, recount.cvrs)
print(f"claimed groups verified: {len(claimed.verified)}, failed: {len(claimed.failures)}, "
      f"images involved: {claimed.referenced}")

# Counting each group once shows what the duplicates added to the tally.
merged = {g.members: g for g in groups + claimed.groups}
adj = cv.dedup_adjusted_tally(recount.cvrs, list(merged.values()), "PRES")
print("votes counted more than once:", dict(adj.removed))
