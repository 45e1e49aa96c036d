"""Replay one churn trace under both schemes and compare the bills.

Small numbers so it finishes in under a minute; the CLI ``replay``
subcommand runs the same engine at benchmark scale.

    python demos/benchmark_sweep.py
"""

from ibbekit import ReplayConfig, gen_synthetic_trace, replay

N_OPS = 120
PARTITION_SIZE = 8
SEED = 31


def run(scheme, rate):
    events = gen_synthetic_trace(N_OPS, rate, seed=SEED)
    cfg = ReplayConfig(scheme=scheme, partition_size=PARTITION_SIZE,
                       seed=SEED, sample_every=25)
    return replay(events, cfg)


print(f"trace: {N_OPS} adds then rate-scaled drain, partition size {PARTITION_SIZE}")
print()
print(f"{'rate':>5} {'scheme':>6} {'members':>8} {'parts':>6} "
      f"{'peak bytes':>10} {'rekeys':>7} {'wraps':>6} {'admin ms':>9}")
for rate in (0.1, 0.3, 0.5):
    for scheme in ("ibbe", "he"):
        r = run(scheme, rate)
        s = r.summary
        wraps = s["admin_aead_wrap"] if scheme == "ibbe" else s["admin_he_wrap"]
        print(f"{rate:>5} {scheme:>6} {s['final_members']:>8} {s['final_partitions']:>6} "
              f"{s['peak_metadata_bytes']:>10} {s['admin_partition_rekey']:>7} "
              f"{wraps:>6} {float(s['admin_ms_total']):>9.0f}")

print()
print("the broadcast scheme pays per partition on removal; the per-member")
print("baseline pays per member, and its metadata grows linearly.")
