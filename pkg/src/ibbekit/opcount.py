"""Global operation counters for cost accounting.

Group exponentiations, pairings, scalar-field multiplications and the
higher-level envelope operations all bump a named counter here.  The
counters are monotone; callers that want the cost of a region take a
snapshot before and after, or use :func:`capture`.

Counting is always on.  The per-operation overhead is one dict update,
which is noise next to any group operation.  Counters are process-global
and not thread-isolated; the benchmark harness is sequential.
"""

from collections import Counter
from contextlib import contextmanager

_counts = Counter()
_suspended = 0

SCALAR_MUL = "scalar_mul"
SCALAR_INV = "scalar_inv"
G1_EXP = "g1_exp"
G2_EXP = "g2_exp"
GT_EXP = "gt_exp"
PAIRING = "pairing"
AEAD_WRAP = "aead_wrap"
AEAD_OPEN = "aead_open"
SEAL = "seal"
UNSEAL = "unseal"
PARTITION_REKEY = "partition_rekey"
HE_WRAP = "he_wrap"
HE_UNWRAP = "he_unwrap"

# Column order used by reports; fixed so CSV output is stable.
ALL_OPS = (
    SCALAR_MUL, SCALAR_INV, G1_EXP, G2_EXP, GT_EXP, PAIRING,
    AEAD_WRAP, AEAD_OPEN, SEAL, UNSEAL, PARTITION_REKEY,
    HE_WRAP, HE_UNWRAP,
)


def bump(name, n=1):
    if not _suspended:
        _counts[name] += n


def snapshot():
    """Copy of all counters as a plain dict."""
    return dict(_counts)


def delta(before, after=None):
    """Per-counter difference between two snapshots (after defaults to now)."""
    if after is None:
        after = snapshot()
    keys = set(before) | set(after)
    return {k: after.get(k, 0) - before.get(k, 0) for k in keys if after.get(k, 0) != before.get(k, 0)}


def reset():
    _counts.clear()


@contextmanager
def capture():
    """Yields a dict that is filled with the ops counted inside the block."""
    before = snapshot()
    out = {}
    try:
        yield out
    finally:
        out.update(delta(before))


@contextmanager
def suspended():
    """No counting inside the block; for harness-internal bookkeeping."""
    global _suspended
    _suspended += 1
    try:
        yield
    finally:
        _suspended -= 1
