"""Trace replay: drive a group scheme through a churn trace and measure it.

Every trace event becomes one admin operation (group creation on the first
add, teardown to an empty group allowed) applied against a metadata store,
with a per-event row recording wall time, operation-count deltas, group
shape and stored metadata size.  Optionally, every k-th event is followed
by a client-side decrypt of a randomly chosen current member, fetched
through the store exactly as a real client would, and checked against the
true group key.

Rows carry only admin-side operation counts; sampled client decrypts
report wall time and correctness per row and aggregate their operation
counts into the summary.  All randomness derives from the config seed, so
two replays of the same trace produce identical operation-count columns.
"""

from __future__ import annotations

import csv
import random
import time
from dataclasses import dataclass, field

from . import group_manager as gm
from . import he_baseline as he
from . import ibbe, opcount
from .errors import InvalidInputError
from .metadata_store import MemoryStore
from .trace import OP_ADD, OP_REMOVE, validate_trace

CSV_SCHEMA = "ibbekit-replay/1"

_ROW_FIELDS = [
    "row_type", "index", "op", "identity", "ok",
    "admin_ms", "decrypt_ms", "decrypt_ok",
    "member_count", "partition_count", "metadata_bytes",
    *opcount.ALL_OPS,
    "metric", "value",
]

# columns that must be bit-identical across replays with equal seeds
DETERMINISTIC_COLUMNS = ["index", "op", "identity", "ok",
                         "member_count", "partition_count", "metadata_bytes",
                         *opcount.ALL_OPS]


@dataclass
class ReplayConfig:
    scheme: str = "ibbe"  # "ibbe" or "he"
    partition_size: int = 1000
    seed: int = 0
    sample_every: int = 0  # 0 disables client decrypt sampling
    group_id: str = "bench"
    verify_decrypt: bool = True


@dataclass
class ReplayReport:
    config: ReplayConfig
    rows: list
    summary: dict

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            fh.write(f"# {CSV_SCHEMA}\n")
            writer = csv.DictWriter(fh, fieldnames=_ROW_FIELDS, restval="")
            writer.writeheader()
            for row in self.rows:
                writer.writerow({"row_type": "event", **row})
            for metric, value in self.summary.items():
                writer.writerow({"row_type": "summary", "metric": metric, "value": value})

    @staticmethod
    def read_csv(path):
        """Returns (event rows, summary dict), all values as strings."""
        with open(path, newline="") as fh:
            first = fh.readline().strip()
            if first != f"# {CSV_SCHEMA}":
                raise InvalidInputError(f"unknown report schema: {first!r}")
            reader = csv.DictReader(fh)
            rows, summary = [], {}
            for row in reader:
                if row["row_type"] == "event":
                    rows.append(row)
                elif row["row_type"] == "summary":
                    summary[row["metric"]] = row["value"]
        return rows, summary


class _IbbeScheme:
    """Partitioned broadcast manager driven through the store."""

    def __init__(self, config, rng, store):
        self.store = store
        self.group_id = config.group_id
        self.partition_size = config.partition_size
        self.msk, self.pk = ibbe.setup(config.partition_size, rng)
        self.sealer = gm.Sealer(rng.getrandbits(256).to_bytes(32, "big"))
        self.meta = None
        self._usks = {}

    def prepare(self, op, identity, rng):
        pass

    def apply(self, op, identity, rng):
        if op == OP_ADD:
            if self.meta is None:
                self.meta = gm.create_group(self.group_id, [identity], self.partition_size,
                                            self.msk, self.pk, self.sealer, rng)
                gm.push_group(self.store, self.meta)
                return
            prev = self.meta.version
            self.meta = gm.add_user(self.meta, identity, self.msk, self.pk, self.sealer, rng)
        else:
            prev = self.meta.version
            self.meta = gm.remove_user(self.meta, identity, self.msk, self.pk, self.sealer, rng)
        gm.push_group(self.store, self.meta, since_version=prev)

    def shape(self):
        if self.meta is None:
            return 0, 0
        return self.meta.member_count, len(self.meta.partitions)

    def client_decrypt(self, identity):
        usk = self._usks.get(identity)
        if usk is None:
            with opcount.suspended():
                usk = self._usks[identity] = ibbe.extract(self.msk, identity)
        part = gm.client_fetch_partition(self.store, self.group_id, identity)
        return gm.decrypt_partition(usk, part, self.pk)

    def true_group_key(self):
        with opcount.suspended():
            return self.sealer.unseal(self.meta.sealed_gk)


class _HeScheme:
    """Per-member hybrid wrapping driven through the store."""

    def __init__(self, config, rng, store):
        self.store = store
        self.group_id = config.group_id
        self.keydir = he.KeyDirectory()
        self.sealer = gm.Sealer(rng.getrandbits(256).to_bytes(32, "big"))
        self.meta = None

    def prepare(self, op, identity, rng):
        # enrollment is user-side onboarding, not group administration
        if op == OP_ADD and identity not in self.keydir:
            with opcount.suspended():
                self.keydir.ensure(identity, rng)

    def apply(self, op, identity, rng):
        if op == OP_ADD:
            if self.meta is None:
                self.meta = he.create_group(self.group_id, [identity], self.keydir,
                                            self.sealer, rng)
            else:
                self.meta = he.add_user(self.meta, identity, self.keydir, self.sealer, rng)
        else:
            self.meta = he.remove_user(self.meta, identity, self.keydir, self.sealer, rng)
        he.push_group(self.store, self.meta)

    def shape(self):
        if self.meta is None:
            return 0, 0
        return self.meta.member_count, 0

    def client_decrypt(self, identity):
        meta = he.load_group(self.store, self.group_id)
        return he.client_decrypt(self.keydir.get(identity), meta)

    def true_group_key(self):
        with opcount.suspended():
            return self.sealer.unseal(self.meta.sealed_gk)


def replay(events, config, store=None) -> ReplayReport:
    if config.scheme not in ("ibbe", "he"):
        raise InvalidInputError(f"unknown scheme {config.scheme!r}")
    validate_trace(events)
    store = store if store is not None else MemoryStore()
    rng = random.Random(config.seed)
    t_setup = time.perf_counter()
    scheme_cls = _IbbeScheme if config.scheme == "ibbe" else _HeScheme
    scheme = scheme_cls(config, rng, store)
    setup_ms = (time.perf_counter() - t_setup) * 1000

    rows = []
    members = []  # insertion-ordered current membership for victim sampling
    peak_bytes = 0
    admin_total = {op: 0 for op in opcount.ALL_OPS}
    client_total = {op: 0 for op in opcount.ALL_OPS}
    decrypt_ms = []
    admin_ms_total = 0.0

    for i, event in enumerate(events):
        scheme.prepare(event.op, event.identity, rng)
        before = opcount.snapshot()
        t0 = time.perf_counter()
        scheme.apply(event.op, event.identity, rng)
        elapsed = (time.perf_counter() - t0) * 1000
        d = opcount.delta(before)
        if event.op == OP_ADD:
            members.append(event.identity)
        else:
            members.remove(event.identity)
        member_count, partition_count = scheme.shape()
        meta_bytes = store.group_bytes(config.group_id)
        peak_bytes = max(peak_bytes, meta_bytes)
        admin_ms_total += elapsed
        row = {
            "index": i, "op": event.op, "identity": event.identity, "ok": 1,
            "admin_ms": f"{elapsed:.3f}", "decrypt_ms": "", "decrypt_ok": "",
            "member_count": member_count, "partition_count": partition_count,
            "metadata_bytes": meta_bytes,
        }
        for op in opcount.ALL_OPS:
            row[op] = d.get(op, 0)
            admin_total[op] += d.get(op, 0)

        sample_due = (config.sample_every > 0 and members
                      and (i + 1) % config.sample_every == 0)
        if sample_due:
            reader = members[rng.randrange(len(members))]
            before_c = opcount.snapshot()
            t1 = time.perf_counter()
            gk = scheme.client_decrypt(reader)
            dt = (time.perf_counter() - t1) * 1000
            dc = opcount.delta(before_c)
            for op in opcount.ALL_OPS:
                client_total[op] += dc.get(op, 0)
            ok = (gk == scheme.true_group_key()) if config.verify_decrypt else True
            decrypt_ms.append(dt)
            row["decrypt_ms"] = f"{dt:.3f}"
            row["decrypt_ok"] = int(ok)
        rows.append(row)

    member_count, partition_count = scheme.shape()
    summary = {
        "schema": CSV_SCHEMA,
        "scheme": config.scheme,
        "partition_size": config.partition_size,
        "seed": config.seed,
        "sample_every": config.sample_every,
        "n_events": len(events),
        "setup_ms": f"{setup_ms:.3f}",
        "admin_ms_total": f"{admin_ms_total:.3f}",
        "final_members": member_count,
        "final_partitions": partition_count,
        "peak_metadata_bytes": peak_bytes,
        "decrypt_samples": len(decrypt_ms),
        "decrypt_ms_mean": f"{sum(decrypt_ms) / len(decrypt_ms):.3f}" if decrypt_ms else "",
        "decrypt_ms_max": f"{max(decrypt_ms):.3f}" if decrypt_ms else "",
    }
    for op in opcount.ALL_OPS:
        summary[f"admin_{op}"] = admin_total[op]
    for op in opcount.ALL_OPS:
        summary[f"client_{op}"] = client_total[op]
    return ReplayReport(config=config, rows=rows, summary=summary)
