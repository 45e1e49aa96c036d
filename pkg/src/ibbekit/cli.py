"""Command-line front end: key setup, group administration, benchmarking.

State lives under paths named in a small JSON config (default
``./ibbekit.json``): the sealing key file and the metadata store root.
``setup`` creates both if missing.  The master secret is written to disk
only sealed; every administrative subcommand unseals it in memory.

    ibbekit setup --capacity 64 --keys ./keys
    ibbekit extract-key --keys ./keys --identity alice --out alice.usk
    ibbekit group create --keys ./keys --group dev --members alice,bob
    ibbekit group add --keys ./keys --group dev --identity carol
    ibbekit group remove --keys ./keys --group dev --identity bob
    ibbekit gen-trace --n-ops 1000 --rate 0.2 --seed 7 --out churn.csv
    ibbekit ingest-vcs --log commits.csv --out churn.csv
    ibbekit replay --trace churn.csv --scheme ibbe --partition-size 100 --out report.csv
    ibbekit params
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from random import Random, SystemRandom

from . import group_manager as gm
from . import ibbe
from .errors import IbbekitError
from .metadata_store import DirectoryStore
from .pairing_core import (
    CURVE_LABEL,
    G1_BYTES,
    G2_BYTES,
    GT_BYTES,
    SCALAR_BYTES,
    SECURITY_LABEL,
)
from .replay import ReplayConfig, replay
from .trace import gen_synthetic_trace, ingest_vcs_trace, read_trace, write_trace

DEFAULT_CONFIG = "ibbekit.json"
PK_FILE = "public.key"
MSK_FILE = "master.sealed"


def _load_config(path, create=False):
    if os.path.exists(path):
        with open(path) as fh:
            return json.load(fh)
    if not create:
        raise IbbekitError(f"config {path} not found; run `ibbekit setup` first")
    base = os.path.dirname(os.path.abspath(path))
    cfg = {
        "sealing_key": os.path.join(base, "sealing.key"),
        "store_root": os.path.join(base, "store"),
    }
    with open(path, "w") as fh:
        json.dump(cfg, fh, indent=2)
        fh.write("\n")
    return cfg


def _sealer(cfg, rng):
    path = cfg["sealing_key"]
    if os.path.exists(path):
        return gm.Sealer.from_file(path)
    return gm.Sealer.generate(path, rng)


def _store(cfg):
    return DirectoryStore(cfg["store_root"])


def _rng(args):
    return Random(args.seed) if getattr(args, "seed", None) is not None else SystemRandom()


def _load_system(args, rng):
    cfg = _load_config(args.config)
    sealer = _sealer(cfg, rng)
    with open(os.path.join(args.keys, PK_FILE), "rb") as fh:
        pk = ibbe.PublicKey.from_bytes(fh.read())
    with open(os.path.join(args.keys, MSK_FILE), "rb") as fh:
        msk = ibbe.MasterSecretKey.from_bytes(sealer.unseal(fh.read()))
    return cfg, sealer, msk, pk


def _members_arg(args):
    members = []
    if args.members:
        members += [m for m in args.members.split(",") if m]
    if args.members_file:
        with open(args.members_file) as fh:
            members += [line.strip() for line in fh if line.strip()]
    if not members:
        raise IbbekitError("no members given; use --members or --members-file")
    return members


def cmd_setup(args):
    rng = _rng(args)
    cfg = _load_config(args.config, create=True)
    sealer = _sealer(cfg, rng)
    os.makedirs(args.keys, exist_ok=True)
    msk, pk = ibbe.setup(args.capacity, rng)
    with open(os.path.join(args.keys, PK_FILE), "wb") as fh:
        fh.write(pk.to_bytes())
    with open(os.path.join(args.keys, MSK_FILE), "wb") as fh:
        fh.write(sealer.seal(msk.to_bytes(), rng))
    print(f"capacity {args.capacity}: wrote {PK_FILE} and sealed {MSK_FILE} to {args.keys}")


def cmd_extract_key(args):
    rng = _rng(args)
    _, _, msk, _ = _load_system(args, rng)
    usk = ibbe.extract(msk, args.identity)
    with open(args.out, "wb") as fh:
        fh.write(usk.to_bytes())
    print(f"user key for {args.identity!r} -> {args.out}")


def _print_group(meta):
    shapes = ", ".join(f"{p.id}:{len(p.members)}" for p in meta.partitions) or "(empty)"
    print(f"group {meta.group_id} v{meta.version}: {meta.member_count} members, "
          f"{len(meta.partitions)} partitions [{shapes}]")


def cmd_group_create(args):
    rng = _rng(args)
    cfg, sealer, msk, pk = _load_system(args, rng)
    meta = gm.create_group(args.group, _members_arg(args), args.partition_size,
                           msk, pk, sealer, rng)
    gm.push_group(_store(cfg), meta)
    _print_group(meta)


def cmd_group_add(args):
    rng = _rng(args)
    cfg, sealer, msk, pk = _load_system(args, rng)
    store = _store(cfg)
    meta = gm.load_group(store, args.group)
    out = gm.add_user(meta, args.identity, msk, pk, sealer, rng)
    gm.push_group(store, out, since_version=meta.version)
    _print_group(out)


def cmd_group_remove(args):
    rng = _rng(args)
    cfg, sealer, msk, pk = _load_system(args, rng)
    store = _store(cfg)
    meta = gm.load_group(store, args.group)
    out = gm.remove_user(meta, args.identity, msk, pk, sealer, rng)
    gm.push_group(store, out, since_version=meta.version)
    _print_group(out)


def cmd_group_show(args):
    cfg = _load_config(args.config)
    _print_group(gm.load_group(_store(cfg), args.group))


def cmd_gen_trace(args):
    events = gen_synthetic_trace(args.n_ops, args.rate, args.seed)
    write_trace(args.out, events)
    print(f"{len(events)} events -> {args.out}")


def cmd_ingest_vcs(args):
    events = ingest_vcs_trace(args.log)
    write_trace(args.out, events)
    print(f"{len(events)} events -> {args.out}")


def cmd_replay(args):
    events = read_trace(args.trace)
    config = ReplayConfig(scheme=args.scheme, partition_size=args.partition_size,
                          seed=args.seed, sample_every=args.sample_every)
    store = DirectoryStore(args.store_dir) if args.store_dir else None
    report = replay(events, config, store=store)
    report.to_csv(args.out)
    s = report.summary
    print(f"{s['n_events']} events ({args.scheme}): {s['final_members']} members, "
          f"{s['final_partitions']} partitions, peak metadata {s['peak_metadata_bytes']} B, "
          f"admin {s['admin_ms_total']} ms -> {args.out}")


def cmd_params(args):
    print(f"curve:              {CURVE_LABEL} ({SECURITY_LABEL})")
    print(f"scalar bytes:       {SCALAR_BYTES}")
    print(f"G1 element bytes:   {G1_BYTES}")
    print(f"G2 element bytes:   {G2_BYTES}")
    print(f"GT element bytes:   {GT_BYTES}")
    print(f"ciphertext bytes:   {ibbe.CIPHERTEXT_BYTES} (constant, any member-set size)")
    pol = gm.DEFAULT_POLICY
    print(f"repartition policy: sparse below {pol.fullness_num}/{pol.fullness_den} full, "
          f"trigger above {pol.trigger_num}/{pol.trigger_den} sparse")


def build_parser():
    top = argparse.ArgumentParser(prog="ibbekit", description=__doc__.splitlines()[0])
    top.add_argument("--config", default=DEFAULT_CONFIG,
                     help=f"JSON config path (default {DEFAULT_CONFIG})")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("setup", help="generate system keys; seal the master secret")
    p.add_argument("--capacity", type=int, required=True,
                   help="max members per partition the public key supports")
    p.add_argument("--keys", required=True, help="directory for key material")
    p.add_argument("--seed", type=int, help="deterministic RNG seed (testing only)")
    p.set_defaults(func=cmd_setup)

    p = sub.add_parser("extract-key", help="derive a member decryption key")
    p.add_argument("--keys", required=True)
    p.add_argument("--identity", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_extract_key)

    pg = sub.add_parser("group", help="group administration")
    gsub = pg.add_subparsers(dest="group_command", required=True)

    p = gsub.add_parser("create")
    p.add_argument("--keys", required=True)
    p.add_argument("--group", required=True)
    p.add_argument("--members", help="comma-separated identities")
    p.add_argument("--members-file", help="one identity per line")
    p.add_argument("--partition-size", type=int, default=1000)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_group_create)

    for name, fn in (("add", cmd_group_add), ("remove", cmd_group_remove)):
        p = gsub.add_parser(name)
        p.add_argument("--keys", required=True)
        p.add_argument("--group", required=True)
        p.add_argument("--identity", required=True)
        p.add_argument("--seed", type=int)
        p.set_defaults(func=fn)

    p = gsub.add_parser("show")
    p.add_argument("--group", required=True)
    p.set_defaults(func=cmd_group_show)

    p = sub.add_parser("gen-trace", help="generate a synthetic churn trace")
    p.add_argument("--n-ops", type=int, required=True)
    p.add_argument("--rate", type=float, required=True,
                   help="fraction of operations that are revocations")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_trace)

    p = sub.add_parser("ingest-vcs", help="derive a churn trace from a commit log")
    p.add_argument("--log", required=True, help="CSV of author,timestamp lines")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ingest_vcs)

    p = sub.add_parser("replay", help="replay a trace and write a benchmark report")
    p.add_argument("--trace", required=True)
    p.add_argument("--scheme", choices=["ibbe", "he"], default="ibbe")
    p.add_argument("--partition-size", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sample-every", type=int, default=0,
                   help="client-decrypt every k-th event (0 = never)")
    p.add_argument("--store-dir", help="use an on-disk store at this path")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("params", help="print sizes and policy constants")
    p.set_defaults(func=cmd_params)
    return top


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except IbbekitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
