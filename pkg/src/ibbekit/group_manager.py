"""Partitioned group-key management on top of the broadcast scheme.

A group's members are split into partitions of at most ``partition_size``
members.  Every partition carries one broadcast ciphertext and an AEAD
envelope ``wrapped_gk`` holding the single shared group key gk under that
partition's broadcast key, so metadata grows with the number of partitions
rather than the number of members:

    group.meta   ->  sealed gk, version, partition directory + member index
    <pid>.part   ->  member list, broadcast ciphertext, wrapped gk

The master secret and the plaintext gk exist only inside the operations in
this module, which stand in for the attested enclave of the deployed
system; everything returned to callers carries gk only sealed or wrapped.

Operations are functional: they return a new ``GroupMetadata`` and never
mutate their input.  All randomness (group keys, nonces, partition choice,
ciphertext randomness) comes from the caller-provided RNG so benchmark
replays are reproducible.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass, replace
from random import SystemRandom

from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives.ciphers.aead import AESGCM

from . import ibbe, opcount
from .errors import (
    InvalidInputError,
    NotAMemberError,
    StaleMetadataError,
    TrustBoundaryError,
    describe_identity,
)
from .pairing_core import as_identity

_SERIAL_VERSION = 1
_SYS_RNG = SystemRandom()

GROUP_KEY_BYTES = 32
_NONCE_BYTES = 12


def random_group_key(rng=None) -> bytes:
    rng = rng if rng is not None else _SYS_RNG
    return rng.getrandbits(8 * GROUP_KEY_BYTES).to_bytes(GROUP_KEY_BYTES, "big")


def _rand_nonce(rng):
    return rng.getrandbits(8 * _NONCE_BYTES).to_bytes(_NONCE_BYTES, "big")


# ---------------------------------------------------------------------------
# Envelope and sealing

def _envelope_key(bk) -> bytes:
    """AEAD key for a partition envelope: 256-bit hash of the broadcast key."""
    return hashlib.sha256(bk.to_bytes()).digest()


def wrap_group_key(gk: bytes, bk, rng=None) -> bytes:
    """nonce || AEAD(gk) under the hashed broadcast key."""
    rng = rng if rng is not None else _SYS_RNG
    nonce = _rand_nonce(rng)
    opcount.bump(opcount.AEAD_WRAP)
    return nonce + AESGCM(_envelope_key(bk)).encrypt(nonce, gk, None)


def unwrap_group_key(blob: bytes, bk) -> bytes:
    """Open a partition envelope; raises StaleMetadataError on mismatch."""
    opcount.bump(opcount.AEAD_OPEN)
    try:
        return AESGCM(_envelope_key(bk)).decrypt(blob[:_NONCE_BYTES], blob[_NONCE_BYTES:], None)
    except InvalidTag as exc:
        raise StaleMetadataError("wrapped group key does not match broadcast key") from exc


class Sealer:
    """Simulated trust-boundary sealing: AEAD under a local secret key.

    The deployed analogue keeps this key inside enclave hardware; here it
    lives in a config-specified secret file.
    """

    _AAD = b"ibbekit:sealed-group-key:v1"

    def __init__(self, key: bytes):
        if len(key) != 32:
            raise TrustBoundaryError("sealing key must be 32 bytes")
        self._aead = AESGCM(key)

    @classmethod
    def from_file(cls, path):
        try:
            with open(path, "rb") as fh:
                return cls(fh.read())
        except OSError as exc:
            raise TrustBoundaryError(f"cannot read sealing key: {exc}") from exc

    @classmethod
    def generate(cls, path, rng=None):
        rng = rng if rng is not None else _SYS_RNG
        key = rng.getrandbits(256).to_bytes(32, "big")
        with open(path, "wb") as fh:
            fh.write(key)
        return cls(key)

    def seal(self, gk: bytes, rng=None) -> bytes:
        rng = rng if rng is not None else _SYS_RNG
        nonce = _rand_nonce(rng)
        opcount.bump(opcount.SEAL)
        return nonce + self._aead.encrypt(nonce, gk, self._AAD)

    def unseal(self, blob: bytes) -> bytes:
        opcount.bump(opcount.UNSEAL)
        try:
            return self._aead.decrypt(blob[:_NONCE_BYTES], blob[_NONCE_BYTES:], self._AAD)
        except InvalidTag as exc:
            raise TrustBoundaryError("unseal failed: wrong sealing key or corrupt blob") from exc


# ---------------------------------------------------------------------------
# Types

@dataclass(frozen=True)
class Partition:
    id: str
    members: tuple  # ordered byte identities
    ciphertext: ibbe.BroadcastCiphertext
    wrapped_gk: bytes
    mod_version: int  # group version at which this record last changed

    def to_bytes(self):
        out = bytearray(struct.pack(">BH", _SERIAL_VERSION, len(self.id)))
        out += self.id.encode("ascii")
        out += struct.pack(">QI", self.mod_version, len(self.members))
        for m in self.members:
            out += struct.pack(">H", len(m)) + m
        out += self.ciphertext.to_bytes()
        out += struct.pack(">H", len(self.wrapped_gk)) + self.wrapped_gk
        return bytes(out)

    @classmethod
    def from_bytes(cls, data):
        try:
            version, idlen = struct.unpack_from(">BH", data, 0)
            if version != _SERIAL_VERSION:
                raise InvalidInputError(f"unsupported partition record version {version}")
            off = 3
            pid = data[off:off + idlen].decode("ascii"); off += idlen
            mod_version, count = struct.unpack_from(">QI", data, off); off += 12
            members = []
            for _ in range(count):
                (mlen,) = struct.unpack_from(">H", data, off); off += 2
                members.append(bytes(data[off:off + mlen])); off += mlen
            ct = ibbe.BroadcastCiphertext.from_bytes(data[off:off + ibbe.CIPHERTEXT_BYTES])
            off += ibbe.CIPHERTEXT_BYTES
            (ylen,) = struct.unpack_from(">H", data, off); off += 2
            y = bytes(data[off:off + ylen]); off += ylen
            if off != len(data) or len(y) != ylen:
                raise InvalidInputError("malformed partition record")
        except (struct.error, UnicodeDecodeError) as exc:
            raise InvalidInputError("malformed partition record") from exc
        return cls(id=pid, members=tuple(members), ciphertext=ct,
                   wrapped_gk=y, mod_version=mod_version)


@dataclass(frozen=True)
class GroupMetadata:
    group_id: str
    partition_size: int
    partitions: tuple  # of Partition
    index: dict  # identity bytes -> partition id
    sealed_gk: bytes
    version: int
    next_seq: int  # partition ids are never reused

    @property
    def member_count(self):
        return len(self.index)

    def partition_of(self, identity):
        return self.index.get(as_identity(identity))

    def group_record_bytes(self):
        gid = self.group_id.encode("ascii")
        out = bytearray(struct.pack(">BH", _SERIAL_VERSION, len(gid)))
        out += gid
        out += struct.pack(">QII", self.version, self.partition_size, self.next_seq)
        out += struct.pack(">H", len(self.sealed_gk)) + self.sealed_gk
        out += struct.pack(">I", len(self.partitions))
        for p in self.partitions:
            out += struct.pack(">H", len(p.id)) + p.id.encode("ascii")
        out += struct.pack(">I", len(self.index))
        for ident, pid in sorted(self.index.items()):
            out += struct.pack(">H", len(ident)) + ident
            out += struct.pack(">H", len(pid)) + pid.encode("ascii")
        return bytes(out)


def parse_group_record(data):
    """Directory part of a group: returns (meta-without-partitions, pid list)."""
    try:
        version, gidlen = struct.unpack_from(">BH", data, 0)
        if version != _SERIAL_VERSION:
            raise InvalidInputError(f"unsupported group record version {version}")
        off = 3
        gid = data[off:off + gidlen].decode("ascii"); off += gidlen
        gversion, psize, next_seq = struct.unpack_from(">QII", data, off); off += 16
        (slen,) = struct.unpack_from(">H", data, off); off += 2
        sealed = bytes(data[off:off + slen]); off += slen
        (npart,) = struct.unpack_from(">I", data, off); off += 4
        pids = []
        for _ in range(npart):
            (plen,) = struct.unpack_from(">H", data, off); off += 2
            pids.append(data[off:off + plen].decode("ascii")); off += plen
        (nidx,) = struct.unpack_from(">I", data, off); off += 4
        index = {}
        for _ in range(nidx):
            (ilen,) = struct.unpack_from(">H", data, off); off += 2
            ident = bytes(data[off:off + ilen]); off += ilen
            (plen,) = struct.unpack_from(">H", data, off); off += 2
            index[ident] = data[off:off + plen].decode("ascii"); off += plen
        if off != len(data):
            raise InvalidInputError("malformed group record")
    except (struct.error, UnicodeDecodeError) as exc:
        raise InvalidInputError("malformed group record") from exc
    skeleton = GroupMetadata(
        group_id=gid, partition_size=psize, partitions=(), index=index,
        sealed_gk=sealed, version=gversion, next_seq=next_seq,
    )
    return skeleton, pids


# ---------------------------------------------------------------------------
# Repartitioning policy

@dataclass(frozen=True)
class RepartitionPolicy:
    """Rebuild when more than ``trigger`` of partitions are under ``fullness`` full.

    Defaults follow the two-thirds / one-half heuristic: a partition is
    sparse when members * 3 < 2 * partition_size (strict integer compare),
    and a rebuild triggers when sparse_count * 2 > partition_count.
    """

    fullness_num: int = 2
    fullness_den: int = 3
    trigger_num: int = 1
    trigger_den: int = 2

    def is_sparse(self, occupancy, partition_size):
        return occupancy * self.fullness_den < self.fullness_num * partition_size

    def should_repartition(self, occupancies, partition_size):
        if not occupancies:
            return False
        sparse = sum(1 for occ in occupancies if self.is_sparse(occ, partition_size))
        return sparse * self.trigger_den > self.trigger_num * len(occupancies)


DEFAULT_POLICY = RepartitionPolicy()


# ---------------------------------------------------------------------------
# Group operations

def _chunks(seq, size):
    for i in range(0, len(seq), size):
        yield seq[i:i + size]


def _build_partitions(members, partition_size, gk, msk, pk, rng, version, start_seq):
    parts = []
    seq = start_seq
    for chunk in _chunks(members, partition_size):
        bk, ct = ibbe.encrypt_msk(msk, pk, chunk, rng)
        parts.append(Partition(
            id=f"p{seq:08d}",
            members=tuple(chunk),
            ciphertext=ct,
            wrapped_gk=wrap_group_key(gk, bk, rng),
            mod_version=version,
        ))
        seq += 1
    return parts, seq


def _meta_from_parts(gid, partition_size, parts, sealed, version, next_seq):
    index = {}
    for p in parts:
        for m in p.members:
            index[m] = p.id
    return GroupMetadata(
        group_id=gid, partition_size=partition_size, partitions=tuple(parts),
        index=index, sealed_gk=sealed, version=version, next_seq=next_seq,
    )


def create_group(group_id, members, partition_size, msk, pk, sealer, rng=None):
    """Partition S in order into ceil(|S|/m) chunks sharing one fresh gk."""
    if partition_size < 1:
        raise InvalidInputError("partition_size must be >= 1")
    if partition_size > pk.capacity:
        raise InvalidInputError("partition_size exceeds public key capacity")
    members = [as_identity(u) for u in members]
    if len(set(members)) != len(members):
        raise InvalidInputError("duplicate identity in member set")
    if not members:
        raise InvalidInputError("member set must be non-empty")
    rng = rng if rng is not None else _SYS_RNG
    gk = random_group_key(rng)
    parts, next_seq = _build_partitions(members, partition_size, gk, msk, pk, rng, 1, 0)
    return _meta_from_parts(group_id, partition_size, parts, sealer.seal(gk, rng), 1, next_seq)


def add_user(meta, u_add, msk, pk, sealer, rng=None):
    """Place u_add into a random non-full partition, or mint a new one.

    The former path touches exactly one partition ciphertext and no
    envelopes; gk and every wrapped_gk stay unchanged.  The latter path
    unseals gk to wrap it for the new partition.
    """
    u_add = as_identity(u_add)
    if u_add in meta.index:
        raise InvalidInputError(f"{describe_identity(u_add)} already a member of {meta.group_id}")
    rng = rng if rng is not None else _SYS_RNG
    version = meta.version + 1
    open_parts = [p for p in meta.partitions if len(p.members) < meta.partition_size]
    if open_parts:
        target = open_parts[rng.randrange(len(open_parts))]
        new_ct = ibbe.add_user_msk(msk, target.ciphertext, u_add, target.members)
        updated = replace(target, members=target.members + (u_add,),
                          ciphertext=new_ct, mod_version=version)
        parts = tuple(updated if p.id == target.id else p for p in meta.partitions)
        next_seq = meta.next_seq
    else:
        gk = sealer.unseal(meta.sealed_gk)
        bk, ct = ibbe.encrypt_msk(msk, pk, [u_add], rng)
        fresh = Partition(
            id=f"p{meta.next_seq:08d}", members=(u_add,), ciphertext=ct,
            wrapped_gk=wrap_group_key(gk, bk, rng), mod_version=version,
        )
        parts = meta.partitions + (fresh,)
        next_seq = meta.next_seq + 1
    out = _meta_from_parts(meta.group_id, meta.partition_size, parts,
                           meta.sealed_gk, version, next_seq)
    return out


def remove_user(meta, u_rem, msk, pk, sealer, rng=None, policy=DEFAULT_POLICY):
    """Revoke u_rem: fresh gk, remove from its partition, rekey the rest.

    Every remaining partition gets a new broadcast key wrapping the new gk;
    an emptied hosting partition is deleted.  The repartition heuristic is
    evaluated afterwards.
    """
    u_rem = as_identity(u_rem)
    pid = meta.index.get(u_rem)
    if pid is None:
        raise NotAMemberError(f"{describe_identity(u_rem)} not a member of {meta.group_id}")
    rng = rng if rng is not None else _SYS_RNG
    version = meta.version + 1
    gk = random_group_key(rng)
    parts = []
    for p in meta.partitions:
        if p.id == pid:
            if len(p.members) == 1:
                continue  # hosting partition drained; drop it
            bk, ct = ibbe.remove_user_msk(msk, pk, p.ciphertext, u_rem, p.members, rng)
            parts.append(replace(
                p, members=tuple(m for m in p.members if m != u_rem),
                ciphertext=ct, wrapped_gk=wrap_group_key(gk, bk, rng),
                mod_version=version,
            ))
        else:
            opcount.bump(opcount.PARTITION_REKEY)
            bk, ct = ibbe.rekey(pk, p.ciphertext, rng)
            parts.append(replace(p, ciphertext=ct,
                                 wrapped_gk=wrap_group_key(gk, bk, rng),
                                 mod_version=version))
    out = _meta_from_parts(meta.group_id, meta.partition_size, tuple(parts),
                           sealer.seal(gk, rng), version, meta.next_seq)
    return maybe_repartition(out, msk, pk, sealer, rng, policy)


def maybe_repartition(meta, msk, pk, sealer, rng=None, policy=DEFAULT_POLICY):
    """Rebuild all partitions (fresh gk, fresh ids) when the policy triggers."""
    occupancies = [len(p.members) for p in meta.partitions]
    if not policy.should_repartition(occupancies, meta.partition_size):
        return meta
    rng = rng if rng is not None else _SYS_RNG
    members = [m for p in meta.partitions for m in p.members]
    version = meta.version + 1
    gk = random_group_key(rng)
    parts, next_seq = _build_partitions(members, meta.partition_size, gk, msk, pk,
                                        rng, version, meta.next_seq)
    return _meta_from_parts(meta.group_id, meta.partition_size, parts,
                            sealer.seal(gk, rng), version, next_seq)


def decrypt_partition(usk, partition, pk) -> bytes:
    """Recover gk from one partition record with a member's key."""
    bk = ibbe.decrypt(pk, usk, partition.members, partition.ciphertext)
    return unwrap_group_key(partition.wrapped_gk, bk)


def client_decrypt(usk, meta, pk) -> bytes:
    """Member-side recovery of gk; touches only the member's own partition."""
    pid = meta.index.get(usk.identity)
    if pid is None:
        raise NotAMemberError(f"{describe_identity(usk.identity)} not a member of {meta.group_id}")
    part = next(p for p in meta.partitions if p.id == pid)
    return decrypt_partition(usk, part, pk)


# ---------------------------------------------------------------------------
# Store layout

def group_record_path(group_id):
    return f"{group_id}/group.meta"


def partition_record_path(group_id, partition_id):
    return f"{group_id}/{partition_id}.part"


def push_group(store, meta, since_version=0):
    """Write partitions changed after since_version, then the group record.

    The group record lands last so a watcher that catches the push
    mid-flight still sees a directory whose references all resolve; stale
    partition records are deleted only after the new directory is visible.
    Returns the group's store version after the push.
    """
    for p in meta.partitions:
        if p.mod_version > since_version:
            store.put(partition_record_path(meta.group_id, p.id), p.to_bytes())
    version = store.put(group_record_path(meta.group_id), meta.group_record_bytes())
    current = {p.id for p in meta.partitions}
    for path in store.list_group(meta.group_id):
        name = path.split("/", 1)[1]
        if name.endswith(".part") and name[:-5] not in current:
            version = store.delete(path)
    return version


def load_group(store, group_id) -> GroupMetadata:
    try:
        payload, _ = store.get(group_record_path(group_id))
    except KeyError:
        raise InvalidInputError(f"no group {group_id!r} in store") from None
    skeleton, pids = parse_group_record(payload)
    parts = []
    for pid in pids:
        data, _ = store.get(partition_record_path(group_id, pid))
        parts.append(Partition.from_bytes(data))
    return replace(skeleton, partitions=tuple(parts))


def client_fetch_partition(store, group_id, identity):
    """Reads the group directory and only the identity's own partition."""
    identity = as_identity(identity)
    payload, _ = store.get(group_record_path(group_id))
    skeleton, _ = parse_group_record(payload)
    pid = skeleton.index.get(identity)
    if pid is None:
        raise NotAMemberError(f"{describe_identity(identity)} not a member of {group_id}")
    data, _ = store.get(partition_record_path(group_id, pid))
    return Partition.from_bytes(data)
