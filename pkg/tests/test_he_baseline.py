"""Per-member hybrid-wrapping baseline: the linear-metadata scheme the
partitioned broadcast layer is measured against."""

import random

import numpy as np
import pytest

from ibbekit import group_manager as gm
from ibbekit import he_baseline as he
from ibbekit import opcount
from ibbekit.errors import InvalidInputError, NotAMemberError, StaleMetadataError
from ibbekit.metadata_store import MemoryStore

from conftest import identities


@pytest.fixture()
def sealer():
    return gm.Sealer(bytes(range(32)))


def directory_for(members, seed=0):
    keydir = he.KeyDirectory()
    rng = random.Random(seed)
    for m in members:
        keydir.enroll(m, rng)
    return keydir, rng


# ---------------------------------------------------------------------------
# Wrapping primitive

def test_wrap_unwrap_round_trip_and_size():
    rng = random.Random(1)
    pair = he.MemberKeyPair.generate(b"alice", rng)
    gk = b"\x42" * 32
    blob = he.wrap_for_member(gk, pair.public_bytes, rng)
    assert len(blob) == he.WRAP_BYTES == 92
    assert he.unwrap_for_member(blob, pair) == gk


def test_unwrap_with_wrong_key_fails_closed():
    rng = random.Random(2)
    alice = he.MemberKeyPair.generate(b"alice", rng)
    bob = he.MemberKeyPair.generate(b"bob", rng)
    blob = he.wrap_for_member(b"\x42" * 32, alice.public_bytes, rng)
    with pytest.raises(StaleMetadataError):
        he.unwrap_for_member(blob, bob)
    with pytest.raises(InvalidInputError):
        he.unwrap_for_member(blob[:-1], alice)


# ---------------------------------------------------------------------------
# Group lifecycle

@pytest.mark.parametrize("size", [1, 10, 100, 1000])
def test_entry_count_tracks_membership(sealer, size):
    members = identities(size)
    keydir, rng = directory_for(members)
    meta = he.create_group("g", members, keydir, sealer, rng)
    assert meta.member_count == size
    assert set(meta.entries) == set(members)


def test_every_member_unwraps_the_same_gk(sealer):
    members = identities(8)
    keydir, rng = directory_for(members)
    meta = he.create_group("g", members, keydir, sealer, rng)
    gk = sealer.unseal(meta.sealed_gk)
    for m in members:
        assert he.client_decrypt(keydir.get(m), meta) == gk


def test_create_requires_enrolled_keys(sealer):
    keydir, rng = directory_for([b"a"])
    with pytest.raises(NotAMemberError):
        he.create_group("g", [b"a", b"stranger"], keydir, sealer, rng)


def test_add_is_one_wrap_and_gk_unchanged(sealer):
    members = identities(6)
    keydir, rng = directory_for(members)
    meta = he.create_group("g", members, keydir, sealer, rng)
    keydir.enroll(b"late", rng)
    with opcount.capture() as ops:
        grown = he.add_user(meta, b"late", keydir, sealer, rng)
    assert ops[opcount.HE_WRAP] == 1
    assert grown.sealed_gk == meta.sealed_gk
    assert grown.version == meta.version + 1
    # incumbent entries are byte-identical
    assert all(grown.entries[m] == meta.entries[m] for m in members)
    assert he.client_decrypt(keydir.get(b"late"), grown) == sealer.unseal(meta.sealed_gk)


def test_remove_rewraps_everyone_under_fresh_gk(sealer):
    members = identities(6)
    keydir, rng = directory_for(members)
    meta = he.create_group("g", members, keydir, sealer, rng)
    victim = members[2]
    with opcount.capture() as ops:
        shrunk = he.remove_user(meta, victim, keydir, sealer, rng)
    assert ops[opcount.HE_WRAP] == len(members) - 1
    assert victim not in shrunk.entries
    new_gk = sealer.unseal(shrunk.sealed_gk)
    assert new_gk != sealer.unseal(meta.sealed_gk)
    for m in shrunk.entries:
        assert he.client_decrypt(keydir.get(m), shrunk) == new_gk
    with pytest.raises(NotAMemberError):
        he.client_decrypt(keydir.get(victim), shrunk)


def test_revoked_key_opens_no_new_wrap_100_trials(sealer):
    for trial in range(100):
        members = identities(3, tag=f"t{trial}-")
        keydir, rng = directory_for(members, seed=trial)
        meta = he.create_group("g", members, keydir, sealer, rng)
        victim = members[rng.randrange(3)]
        shrunk = he.remove_user(meta, victim, keydir, sealer, rng)
        stale = keydir.get(victim)
        for wrap in shrunk.entries.values():
            with pytest.raises(StaleMetadataError):
                he.unwrap_for_member(wrap, stale)


def test_membership_validation(sealer):
    members = identities(3)
    keydir, rng = directory_for(members)
    meta = he.create_group("g", members, keydir, sealer, rng)
    with pytest.raises(InvalidInputError):
        he.add_user(meta, members[0], keydir, sealer, rng)
    with pytest.raises(NotAMemberError):
        he.remove_user(meta, b"ghost", keydir, sealer, rng)
    with pytest.raises(InvalidInputError):
        he.create_group("g", [], keydir, sealer, rng)
    with pytest.raises(InvalidInputError):
        he.create_group("g", [b"a", b"a"], keydir, sealer, rng)


# ---------------------------------------------------------------------------
# Metadata size model

def test_serialized_size_matches_formula(sealer):
    members = identities(37)
    keydir, rng = directory_for(members)
    meta = he.create_group("grp", members, keydir, sealer, rng)
    predicted = he.metadata_size([len(m) for m in members], len("grp"))
    assert len(meta.to_bytes()) == predicted


def test_metadata_round_trip(sealer):
    members = identities(5)
    keydir, rng = directory_for(members)
    meta = he.create_group("grp", members, keydir, sealer, rng)
    again = he.HEGroupMetadata.from_bytes(meta.to_bytes())
    assert again == meta
    with pytest.raises(InvalidInputError):
        he.HEGroupMetadata.from_bytes(meta.to_bytes()[:-1])


def test_metadata_growth_is_strictly_linear():
    # log-log fit over two decades; exponent must be 1 within 0.05
    sizes = np.array([100, 300, 1000, 3000, 10_000])
    ident_len = len("user00000")
    bytes_for = np.array([
        he.metadata_size([ident_len] * int(n), group_id_len=5) for n in sizes])
    slope = np.polyfit(np.log(sizes), np.log(bytes_for), 1)[0]
    assert abs(slope - 1.0) < 0.05


# ---------------------------------------------------------------------------
# Key directory persistence

def test_keydir_save_load_round_trip(tmp_path):
    members = identities(4)
    keydir, rng = directory_for(members)
    keydir.save(tmp_path)
    again = he.KeyDirectory.load(tmp_path)
    assert len(again) == len(keydir)
    for m in members:
        assert again.get(m) == keydir.get(m)
    with pytest.raises(InvalidInputError):
        keydir.enroll(members[0], rng)
    assert keydir.ensure(members[0], rng) == keydir.get(members[0])


# ---------------------------------------------------------------------------
# Store integration

def test_push_then_load_is_identity(sealer):
    store = MemoryStore()
    members = identities(5)
    keydir, rng = directory_for(members)
    meta = he.create_group("grp", members, keydir, sealer, rng)
    he.push_group(store, meta)
    assert he.load_group(store, "grp") == meta
