"""Membership-churn traces: generation, VCS-log ingestion, CSV I/O.

A trace is an ordered list of add/remove events over string identities.
The CSV form is ``op,identity,timestamp`` with a header line; timestamps
are integers (event index for synthetic traces, epoch seconds for
ingested ones) and carry no semantics beyond ordering documentation.

Synthetic traces are fill-then-drain: all ``n_ops`` identities join during
the fill phase, then ``round(n_ops * rate)`` uniformly chosen members
leave.  Every rate sees the same peak group, so the remove-side workload
scales with the rate alone instead of being confounded by a shrinking
build-out.
"""

from __future__ import annotations

import csv
import random
from typing import NamedTuple

from .errors import InvalidInputError, TraceParseError

OP_ADD = "add"
OP_REMOVE = "remove"
_HEADER = ["op", "identity", "timestamp"]


class TraceEvent(NamedTuple):
    op: str
    identity: str
    timestamp: int


def gen_synthetic_trace(n_ops, revocation_rate, seed):
    """Fill-then-drain trace: n_ops adds, then round(n_ops * rate) removes.

    Removal victims are drawn uniformly from the current membership, so a
    rate-1.0 trace drains the group completely.  Total length is
    ``n_ops + round(n_ops * rate)`` events.
    """
    if n_ops < 1:
        raise InvalidInputError("n_ops must be >= 1")
    if not 0.0 <= revocation_rate <= 1.0:
        raise InvalidInputError("revocation_rate must be in [0, 1]")
    n_removes = round(n_ops * revocation_rate)
    rng = random.Random(seed)
    width = max(5, len(str(n_ops - 1)))
    events = [TraceEvent(OP_ADD, f"user{i:0{width}d}", i) for i in range(n_ops)]
    current = [e.identity for e in events]
    for i in range(n_removes):
        victim = current.pop(rng.randrange(len(current)))
        events.append(TraceEvent(OP_REMOVE, victim, n_ops + i))
    return events


def validate_trace(events):
    """Check the remove-after-add invariant; returns the final member set.

    Raises InvalidInputError naming the first offending event index.
    """
    current = set()
    for i, e in enumerate(events):
        if e.op == OP_ADD:
            if e.identity in current:
                raise InvalidInputError(f"event {i}: add of existing member {e.identity!r}")
            current.add(e.identity)
        elif e.op == OP_REMOVE:
            if e.identity not in current:
                raise InvalidInputError(f"event {i}: remove of non-member {e.identity!r}")
            current.remove(e.identity)
        else:
            raise InvalidInputError(f"event {i}: unknown op {e.op!r}")
    return current


def write_trace(path, events):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_HEADER)
        for e in events:
            writer.writerow([e.op, e.identity, e.timestamp])


def read_trace(path):
    """Parse a trace CSV; TraceParseError carries the 1-based line number."""
    events = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        for row in reader:
            line_no = reader.line_num
            if line_no == 1:
                if row != _HEADER:
                    raise TraceParseError(line_no, f"expected header {','.join(_HEADER)}")
                continue
            if not row:
                continue
            if len(row) != 3:
                raise TraceParseError(line_no, f"expected 3 fields, got {len(row)}")
            op, identity, ts = row
            if op not in (OP_ADD, OP_REMOVE):
                raise TraceParseError(line_no, f"unknown op {op!r}")
            if not identity:
                raise TraceParseError(line_no, "empty identity")
            try:
                ts = int(ts)
            except ValueError:
                raise TraceParseError(line_no, f"bad timestamp {ts!r}") from None
            events.append(TraceEvent(op, identity, ts))
    return events


def ingest_vcs_trace(path):
    """Turn a commit log (``author,timestamp`` lines) into a churn trace.

    An author's first commit becomes an add at that timestamp; their last
    commit becomes a remove, emitted only when some strictly later commit
    exists (authors active at the end of the log never leave).  Events are
    ordered by timestamp with adds before removes on ties, then by
    identity for determinism.
    """
    first, last = {}, {}
    max_ts = None
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        for row in reader:
            line_no = reader.line_num
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if row[0].strip().startswith("#"):
                continue
            if len(row) != 2:
                raise TraceParseError(line_no, f"expected author,timestamp, got {len(row)} fields")
            author, ts = row[0].strip(), row[1].strip()
            if not author:
                raise TraceParseError(line_no, "empty author")
            try:
                ts = int(ts)
            except ValueError:
                raise TraceParseError(line_no, f"bad timestamp {ts!r}") from None
            if author not in first or ts < first[author]:
                first[author] = ts
            if author not in last or ts > last[author]:
                last[author] = ts
            max_ts = ts if max_ts is None else max(max_ts, ts)
    events = [TraceEvent(OP_ADD, a, t) for a, t in first.items()]
    events += [TraceEvent(OP_REMOVE, a, t) for a, t in last.items() if t < max_ts]
    events.sort(key=lambda e: (e.timestamp, 0 if e.op == OP_ADD else 1, e.identity))
    return events
