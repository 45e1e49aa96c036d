"""Walk through the broadcast scheme: one ciphertext, many readers.

Run from the repository root after installing:

    python demos/broadcast_basics.py
"""

import random
import time

from ibbekit import (
    CIPHERTEXT_BYTES,
    NotAMemberError,
    add_user_msk,
    decrypt,
    encrypt_msk,
    encrypt_pk,
    extract,
    remove_user_msk,
    setup,
)

rng = random.Random(2024)

print("== system setup (capacity 8) ==")
t0 = time.perf_counter()
msk, pk = setup(8, rng)
print(f"   master secret + public key in {time.perf_counter() - t0:.2f}s")
print(f"   public key supports member sets up to {pk.capacity}")

team = ["alice", "bob", "carol", "dave"]
keys = {u: extract(msk, u) for u in team + ["mallory", "erin"]}

print("\n== one ciphertext for the whole team ==")
bk, ct = encrypt_msk(msk, pk, team, rng)
print(f"   ciphertext is {len(ct.to_bytes())} bytes "
      f"(always {CIPHERTEXT_BYTES}, regardless of team size)")

for u in team:
    assert decrypt(pk, keys[u], team, ct) == bk
print(f"   all {len(team)} members recover the same broadcast key")

try:
    decrypt(pk, keys["mallory"], team, ct)
except NotAMemberError as exc:
    print(f"   outsider rejected: {exc}")

print("\n== public-key mode produces the same wire format ==")
bk2, ct2 = encrypt_pk(pk, team, rng)
assert len(ct2.to_bytes()) == CIPHERTEXT_BYTES
assert decrypt(pk, keys["alice"], team, ct2) == bk2
print("   anyone holding the public key can address the team; "
      "decryption is unchanged")

print("\n== incremental membership updates ==")
bigger = team + ["erin"]
ct3 = add_user_msk(msk, ct, "erin", team)
assert decrypt(pk, keys["erin"], bigger, ct3) == bk
print("   add: erin joins without re-encrypting; broadcast key unchanged")

smaller = [u for u in bigger if u != "bob"]
bk4, ct4 = remove_user_msk(msk, pk, ct3, "bob", bigger, rng)
assert decrypt(pk, keys["alice"], smaller, ct4) == bk4
assert bk4 != bk
print("   remove: bob leaves, broadcast key rotates")
try:
    decrypt(pk, keys["bob"], smaller, ct4)
except NotAMemberError as exc:
    print(f"   revoked member rejected: {exc}")

print("\ndone.")
