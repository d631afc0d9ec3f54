"""Random inputs shared by the property tests and the acceptance suite."""

from __future__ import annotations

import random

from canvasskit.dup_forensics import BatchSequence, SequenceRun
from canvasskit.records import ImageRef


def symbol_signature(sym) -> tuple:
    return (("PRES", str(sym), ""),)


def random_alignment_instance(seed: int, max_len: int = 40) -> tuple[dict, dict, int]:
    """A few short batches over a small alphabet with planted copied stretches.

    Returns ``(sequences, raw, min_run)`` where ``raw`` maps batch keys to the
    bare symbol lists the oracle works on.
    """
    rng = random.Random(seed)
    alphabet = rng.randint(2, 6)
    raw = {}
    for b in range(rng.randint(2, 5)):
        raw[(900, b + 1)] = [rng.randrange(alphabet) for _ in range(rng.randint(0, max_len))]
    keys = list(raw)
    for _ in range(rng.randint(0, 3)):
        a, b = rng.sample(keys, 2)
        A, B = raw[a], raw[b]
        if not A or not B:
            continue
        n = rng.randint(1, min(len(A), len(B)))
        i, j = rng.randint(0, len(A) - n), rng.randint(0, len(B) - n)
        piece = A[i:i + n]
        B[j:j + n] = piece[::-1] if rng.random() < 0.5 else piece
    min_run = rng.randint(2, 6)
    seqs = {k: BatchSequence(tuple(ImageRef(k[0], k[1], p + 1) for p in range(len(v))),
                             tuple(symbol_signature(s) for s in v)) for k, v in raw.items()}
    return seqs, raw, min_run


def run_tuple(r: SequenceRun) -> tuple:
    return (r.batch_a, r.batch_b, r.start_a, r.start_b, r.length, r.orientation)


def group_positions(group, seqs) -> tuple:
    where = {ref: (k, p) for k, s in seqs.items() for p, ref in enumerate(s.refs)}
    return tuple(sorted(where[m] for m in group.members))
