"""Per-member hybrid-encryption baseline for group key distribution.

The comparison point for the partitioned broadcast design: the group key
is wrapped separately for every member under their X25519 public key
(ephemeral ECDH, HKDF-SHA256, AES-GCM), so metadata holds one entry per
member and a removal rewraps for everyone left.

Wrap layout, 92 bytes per member:

    ephemeral_pub(32) || nonce(12) || aesgcm(gk)(32 + 16 tag)

Admin-side gk handling mirrors the partitioned manager: the current gk is
kept sealed in the metadata and unsealed only to wrap it for a joiner.
"""

from __future__ import annotations

import os
import struct
from dataclasses import dataclass
from random import SystemRandom

from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives.asymmetric.x25519 import (
    X25519PrivateKey,
    X25519PublicKey,
)
from cryptography.hazmat.primitives.ciphers.aead import AESGCM
from cryptography.hazmat.primitives.hashes import SHA256
from cryptography.hazmat.primitives.kdf.hkdf import HKDF

from . import opcount
from .errors import (
    InvalidInputError,
    NotAMemberError,
    StaleMetadataError,
    describe_identity,
)
from .group_manager import GROUP_KEY_BYTES, random_group_key
from .pairing_core import as_identity

_SERIAL_VERSION = 1
_SYS_RNG = SystemRandom()
_NONCE_BYTES = 12

MEMBER_KEY_BYTES = 32
WRAP_BYTES = 32 + _NONCE_BYTES + GROUP_KEY_BYTES + 16  # 92


def _rand(rng, n):
    return rng.getrandbits(8 * n).to_bytes(n, "big")


def _kdf(shared, eph_pub, member_pub):
    return HKDF(algorithm=SHA256(), length=32, salt=None,
                info=b"ibbekit:he-wrap:v1" + eph_pub + member_pub).derive(shared)


@dataclass(frozen=True)
class MemberKeyPair:
    identity: bytes
    private_bytes: bytes
    public_bytes: bytes

    @classmethod
    def generate(cls, identity, rng=None):
        rng = rng if rng is not None else _SYS_RNG
        sk = X25519PrivateKey.from_private_bytes(_rand(rng, MEMBER_KEY_BYTES))
        return cls(
            identity=as_identity(identity),
            private_bytes=sk.private_bytes_raw(),
            public_bytes=sk.public_key().public_bytes_raw(),
        )


class KeyDirectory:
    """Identity -> member keypair map, optionally persisted as flat files."""

    def __init__(self):
        self._pairs = {}

    def __len__(self):
        return len(self._pairs)

    def __contains__(self, identity):
        return as_identity(identity) in self._pairs

    def enroll(self, identity, rng=None) -> MemberKeyPair:
        pair = MemberKeyPair.generate(identity, rng)
        if pair.identity in self._pairs:
            raise InvalidInputError(f"{describe_identity(pair.identity)} already enrolled")
        self._pairs[pair.identity] = pair
        return pair

    def ensure(self, identity, rng=None) -> MemberKeyPair:
        ident = as_identity(identity)
        pair = self._pairs.get(ident)
        return pair if pair is not None else self.enroll(ident, rng)

    def get(self, identity) -> MemberKeyPair:
        ident = as_identity(identity)
        try:
            return self._pairs[ident]
        except KeyError:
            raise NotAMemberError(f"no keypair for {describe_identity(ident)}") from None

    def public_key(self, identity) -> bytes:
        return self.get(identity).public_bytes

    def save(self, directory):
        os.makedirs(directory, exist_ok=True)
        for pair in self._pairs.values():
            path = os.path.join(directory, pair.identity.hex() + ".x25519")
            with open(path, "wb") as fh:
                fh.write(pair.private_bytes + pair.public_bytes)

    @classmethod
    def load(cls, directory):
        out = cls()
        for name in sorted(os.listdir(directory)):
            if not name.endswith(".x25519"):
                continue
            with open(os.path.join(directory, name), "rb") as fh:
                blob = fh.read()
            if len(blob) != 2 * MEMBER_KEY_BYTES:
                raise InvalidInputError(f"malformed keypair file {name}")
            out._pairs[bytes.fromhex(name[:-7])] = MemberKeyPair(
                identity=bytes.fromhex(name[:-7]),
                private_bytes=blob[:MEMBER_KEY_BYTES],
                public_bytes=blob[MEMBER_KEY_BYTES:],
            )
        return out


def wrap_for_member(gk, member_public: bytes, rng=None) -> bytes:
    rng = rng if rng is not None else _SYS_RNG
    eph = X25519PrivateKey.from_private_bytes(_rand(rng, 32))
    eph_pub = eph.public_key().public_bytes_raw()
    shared = eph.exchange(X25519PublicKey.from_public_bytes(member_public))
    nonce = _rand(rng, _NONCE_BYTES)
    opcount.bump(opcount.HE_WRAP)
    ct = AESGCM(_kdf(shared, eph_pub, member_public)).encrypt(nonce, gk, None)
    return eph_pub + nonce + ct


def unwrap_for_member(blob: bytes, pair: MemberKeyPair) -> bytes:
    if len(blob) != WRAP_BYTES:
        raise InvalidInputError(f"wrap must be {WRAP_BYTES} bytes")
    eph_pub, nonce, ct = blob[:32], blob[32:32 + _NONCE_BYTES], blob[32 + _NONCE_BYTES:]
    sk = X25519PrivateKey.from_private_bytes(pair.private_bytes)
    shared = sk.exchange(X25519PublicKey.from_public_bytes(eph_pub))
    opcount.bump(opcount.HE_UNWRAP)
    try:
        return AESGCM(_kdf(shared, eph_pub, pair.public_bytes)).decrypt(nonce, ct, None)
    except InvalidTag as exc:
        raise StaleMetadataError("wrap does not open under this member key") from exc


@dataclass(frozen=True)
class HEGroupMetadata:
    group_id: str
    entries: dict  # identity bytes -> 92-byte wrap
    sealed_gk: bytes
    version: int

    @property
    def member_count(self):
        return len(self.entries)

    def to_bytes(self):
        gid = self.group_id.encode("ascii")
        out = bytearray(struct.pack(">BH", _SERIAL_VERSION, len(gid)))
        out += gid
        out += struct.pack(">Q", self.version)
        out += struct.pack(">H", len(self.sealed_gk)) + self.sealed_gk
        out += struct.pack(">I", len(self.entries))
        for ident, wrap in sorted(self.entries.items()):
            out += struct.pack(">H", len(ident)) + ident
            out += struct.pack(">H", len(wrap)) + wrap
        return bytes(out)

    @classmethod
    def from_bytes(cls, data):
        try:
            version, gidlen = struct.unpack_from(">BH", data, 0)
            if version != _SERIAL_VERSION:
                raise InvalidInputError(f"unsupported record version {version}")
            off = 3
            gid = data[off:off + gidlen].decode("ascii"); off += gidlen
            (gversion,) = struct.unpack_from(">Q", data, off); off += 8
            (slen,) = struct.unpack_from(">H", data, off); off += 2
            sealed = bytes(data[off:off + slen]); off += slen
            (count,) = struct.unpack_from(">I", data, off); off += 4
            entries = {}
            for _ in range(count):
                (ilen,) = struct.unpack_from(">H", data, off); off += 2
                ident = bytes(data[off:off + ilen]); off += ilen
                (wlen,) = struct.unpack_from(">H", data, off); off += 2
                entries[ident] = bytes(data[off:off + wlen]); off += wlen
            if off != len(data):
                raise InvalidInputError("malformed group record")
        except (struct.error, UnicodeDecodeError) as exc:
            raise InvalidInputError("malformed group record") from exc
        return cls(group_id=gid, entries=entries, sealed_gk=sealed, version=gversion)


SEALED_GK_BYTES = _NONCE_BYTES + GROUP_KEY_BYTES + 16  # 60


def metadata_size(identity_lengths, group_id_len) -> int:
    """Exact serialized group record size for the given identity byte lengths.

    Lets scaling comparisons price a membership without materializing it.
    """
    fixed = 3 + group_id_len + 8 + 2 + SEALED_GK_BYTES + 4
    return fixed + sum(2 + n + 2 + WRAP_BYTES for n in identity_lengths)


def create_group(group_id, members, keydir, sealer, rng=None) -> HEGroupMetadata:
    members = [as_identity(u) for u in members]
    if len(set(members)) != len(members):
        raise InvalidInputError("duplicate identity in member set")
    if not members:
        raise InvalidInputError("member set must be non-empty")
    rng = rng if rng is not None else _SYS_RNG
    gk = random_group_key(rng)
    entries = {u: wrap_for_member(gk, keydir.public_key(u), rng) for u in members}
    return HEGroupMetadata(group_id=group_id, entries=entries,
                           sealed_gk=sealer.seal(gk, rng), version=1)


def add_user(meta, u_add, keydir, sealer, rng=None) -> HEGroupMetadata:
    """One wrap of the unchanged current gk; nothing else moves."""
    u_add = as_identity(u_add)
    if u_add in meta.entries:
        raise InvalidInputError(f"{describe_identity(u_add)} already a member of {meta.group_id}")
    rng = rng if rng is not None else _SYS_RNG
    gk = sealer.unseal(meta.sealed_gk)
    entries = dict(meta.entries)
    entries[u_add] = wrap_for_member(gk, keydir.public_key(u_add), rng)
    return HEGroupMetadata(group_id=meta.group_id, entries=entries,
                           sealed_gk=meta.sealed_gk, version=meta.version + 1)


def remove_user(meta, u_rem, keydir, sealer, rng=None) -> HEGroupMetadata:
    """Fresh gk rewrapped for each of the n-1 remaining members."""
    u_rem = as_identity(u_rem)
    if u_rem not in meta.entries:
        raise NotAMemberError(f"{describe_identity(u_rem)} not a member of {meta.group_id}")
    rng = rng if rng is not None else _SYS_RNG
    gk = random_group_key(rng)
    entries = {u: wrap_for_member(gk, keydir.public_key(u), rng)
               for u in meta.entries if u != u_rem}
    return HEGroupMetadata(group_id=meta.group_id, entries=entries,
                           sealed_gk=sealer.seal(gk, rng), version=meta.version + 1)


def client_decrypt(pair: MemberKeyPair, meta: HEGroupMetadata) -> bytes:
    wrap = meta.entries.get(pair.identity)
    if wrap is None:
        raise NotAMemberError(f"{describe_identity(pair.identity)} not a member of {meta.group_id}")
    return unwrap_for_member(wrap, pair)


# Single-level store layout: the whole group is one record.

def group_record_path(group_id):
    return f"{group_id}/group.meta"


def push_group(store, meta) -> int:
    return store.put(group_record_path(meta.group_id), meta.to_bytes())


def load_group(store, group_id) -> HEGroupMetadata:
    payload, _ = store.get(group_record_path(group_id))
    return HEGroupMetadata.from_bytes(payload)
