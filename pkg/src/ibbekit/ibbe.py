"""Identity-based broadcast encryption with constant-size ciphertexts.

Implements the Delerablee-style scheme over the pairing abstraction, in two
trust modes that produce identical ciphertexts:

* public-key mode: anyone holding the public key can encrypt to a member
  set S at quadratic cost (``encrypt_pk``), by expanding the product
  prod_{u in S} (gamma + H(u)) through its elementary symmetric
  coefficients over the published powers h^(gamma^i);

* master-secret mode: a holder of the master secret evaluates the same
  product directly in the scalar field (``encrypt_msk``, linear cost), and
  can splice single members in and out of an existing ciphertext
  (``add_user_msk`` / ``remove_user_msk``) at constant cost.

``rekey`` refreshes the randomness of a ciphertext for an unchanged member
set using only the public key.

Keys and ciphertexts:

    msk = (g, gamma)                         g random in G1
    pk  = (w, v, h, h^gamma, ..., h^gamma^m) w = g^gamma, v = e(g, h)
    usk_u = g^(1 / (gamma + H(u)))
    ciphertext for S with randomness k:
        c1 = w^(-k)
        c2 = h^(k * prod_{u in S} (gamma + H(u)))
        c3 = h^(prod_{u in S} (gamma + H(u)))
    shared key bk = v^k  (a GT element)

c3 carries no secret (it is computable from the public key alone) and is
kept in the ciphertext so both incremental updates and public rekeying stay
constant-time.

Encryption ops accept an optional explicit ``k`` so tests can compare
outputs across modes and against incremental updates; production callers
leave it None.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from functools import cached_property
from random import SystemRandom

from . import opcount
from .errors import (
    CapacityExceededError,
    DegenerateIdentityError,
    InvalidInputError,
    NotAMemberError,
    describe_identity,
)
from .pairing_core import (
    G1_BYTES,
    G2_BYTES,
    GT_BYTES,
    SCALAR_BYTES,
    FixedBase,
    G1Elem,
    G2Elem,
    GTElem,
    MultiExpCache,
    Scalar,
    as_identity,
    g2_multiexp,
    hash_to_scalar,
    pairing,
)

_SERIAL_VERSION = 1
_SYS_RNG = SystemRandom()

CIPHERTEXT_BYTES = 1 + G1_BYTES + 2 * G2_BYTES


@dataclass(frozen=True)
class MasterSecretKey:
    """(g, gamma); callers must keep serialized copies sealed, never plain."""

    g: G1Elem
    gamma: Scalar

    def to_bytes(self):
        return struct.pack(">B", _SERIAL_VERSION) + self.g.to_bytes() + self.gamma.to_bytes()

    @classmethod
    def from_bytes(cls, data):
        if len(data) != 1 + G1_BYTES + SCALAR_BYTES or data[0] != _SERIAL_VERSION:
            raise InvalidInputError("malformed master secret key")
        g = G1Elem.from_bytes(data[1:1 + G1_BYTES])
        gamma = Scalar.from_bytes(data[1 + G1_BYTES:])
        return cls(g=g, gamma=gamma)


@dataclass(frozen=True, eq=False)
class PublicKey:
    w: G1Elem
    v: GTElem
    h_powers: tuple  # (h, h^gamma, ..., h^gamma^m)

    @property
    def capacity(self):
        """Maximum member-set size this key supports."""
        return len(self.h_powers) - 1

    # Lazy per-key precomputation; cached_property writes straight into
    # __dict__ so it coexists with frozen=True.
    @cached_property
    def _w_fixed(self):
        return FixedBase(self.w)

    @cached_property
    def _v_fixed(self):
        return FixedBase(self.v)

    @cached_property
    def _h_fixed(self):
        return FixedBase(self.h_powers[0])

    @cached_property
    def _multiexp_cache(self):
        return MultiExpCache()

    def __eq__(self, other):
        return (
            isinstance(other, PublicKey)
            and self.w == other.w
            and self.v == other.v
            and self.h_powers == other.h_powers
        )

    def to_bytes(self):
        out = bytearray(struct.pack(">BI", _SERIAL_VERSION, len(self.h_powers)))
        out += self.w.to_bytes()
        out += self.v.to_bytes()
        for hp in self.h_powers:
            out += hp.to_bytes()
        return bytes(out)

    @classmethod
    def from_bytes(cls, data):
        try:
            version, count = struct.unpack_from(">BI", data, 0)
        except struct.error as exc:
            raise InvalidInputError("truncated public key") from exc
        if version != _SERIAL_VERSION:
            raise InvalidInputError(f"unsupported public key version {version}")
        expect = 5 + G1_BYTES + GT_BYTES + count * G2_BYTES
        if len(data) != expect or count < 2:
            raise InvalidInputError("malformed public key")
        off = 5
        w = G1Elem.from_bytes(data[off:off + G1_BYTES]); off += G1_BYTES
        v = GTElem.from_bytes(data[off:off + GT_BYTES]); off += GT_BYTES
        powers = []
        for _ in range(count):
            powers.append(G2Elem.from_bytes(data[off:off + G2_BYTES]))
            off += G2_BYTES
        return cls(w=w, v=v, h_powers=tuple(powers))


@dataclass(frozen=True)
class UserSecretKey:
    identity: bytes
    point: G1Elem

    def to_bytes(self):
        ident = self.identity
        return struct.pack(">BH", _SERIAL_VERSION, len(ident)) + ident + self.point.to_bytes()

    @classmethod
    def from_bytes(cls, data):
        try:
            version, idlen = struct.unpack_from(">BH", data, 0)
        except struct.error as exc:
            raise InvalidInputError("truncated user key") from exc
        if version != _SERIAL_VERSION or len(data) != 3 + idlen + G1_BYTES or idlen == 0:
            raise InvalidInputError("malformed user key")
        ident = data[3:3 + idlen]
        point = G1Elem.from_bytes(data[3 + idlen:])
        return cls(identity=bytes(ident), point=point)


@dataclass(frozen=True)
class BroadcastCiphertext:
    """Constant-size ciphertext (c1, c2, c3); serialized length is fixed."""

    c1: G1Elem
    c2: G2Elem
    c3: G2Elem

    def to_bytes(self):
        return (
            struct.pack(">B", _SERIAL_VERSION)
            + self.c1.to_bytes()
            + self.c2.to_bytes()
            + self.c3.to_bytes()
        )

    @classmethod
    def from_bytes(cls, data):
        if len(data) != CIPHERTEXT_BYTES:
            raise InvalidInputError(f"ciphertext must be {CIPHERTEXT_BYTES} bytes")
        if data[0] != _SERIAL_VERSION:
            raise InvalidInputError(f"unsupported ciphertext version {data[0]}")
        off = 1
        c1 = G1Elem.from_bytes(data[off:off + G1_BYTES]); off += G1_BYTES
        c2 = G2Elem.from_bytes(data[off:off + G2_BYTES]); off += G2_BYTES
        c3 = G2Elem.from_bytes(data[off:off + G2_BYTES])
        return cls(c1=c1, c2=c2, c3=c3)


# ---------------------------------------------------------------------------
# Helpers

def elementary_symmetric(values):
    """Elementary symmetric polynomials [E_1, ..., E_n] of the given scalars.

    E_j is the sum over all j-element subsets of the product of the subset.
    Computed by the incremental recurrence, n(n+1)/2 scalar multiplications.
    """
    coeffs = [Scalar(1)]
    for a in values:
        coeffs.append(Scalar(0))
        for j in range(len(coeffs) - 1, 0, -1):
            coeffs[j] = coeffs[j] + coeffs[j - 1] * a
    return coeffs[1:]


def _normalize_members(members):
    """Canonical member byte-identities; rejects empties and duplicates."""
    out = [as_identity(u) for u in members]
    if len(out) == 0:
        raise InvalidInputError("member set must be non-empty")
    if len(set(out)) != len(out):
        raise InvalidInputError("duplicate identity in member set")
    return out


def _member_hashes(members):
    return [hash_to_scalar(u) for u in members]


def _gamma_shift(msk, identity):
    """gamma + H(u), rejecting the degenerate zero case."""
    d = msk.gamma + hash_to_scalar(identity)
    if d.is_zero():
        raise DegenerateIdentityError(f"gamma + H({describe_identity(identity)}) = 0")
    return d


def _fresh_k(rng, k):
    if k is None:
        return Scalar.random(rng if rng is not None else _SYS_RNG)
    if not isinstance(k, Scalar) or k.is_zero():
        raise InvalidInputError("explicit k must be a non-zero Scalar")
    return k


# ---------------------------------------------------------------------------
# Scheme operations

def setup(capacity, rng=None):
    """Generate (msk, pk) supporting member sets of up to ``capacity``.

    Costs exactly ``capacity`` G2 exponentiations (the published powers of
    h), plus one G1 exponentiation and one pairing.
    """
    if capacity < 1:
        raise InvalidInputError("capacity must be >= 1")
    rng = rng if rng is not None else _SYS_RNG
    g = G1Elem.random(rng)
    h = G2Elem.random(rng)
    gamma = Scalar.random(rng)
    w = g ** gamma
    v = pairing(g, h)
    h_fixed = FixedBase(h)
    powers = [h]
    gamma_pow = Scalar(1)
    for _ in range(capacity):
        gamma_pow = gamma_pow * gamma
        powers.append(h_fixed.exp(gamma_pow))
    msk = MasterSecretKey(g=g, gamma=gamma)
    pk = PublicKey(w=w, v=v, h_powers=tuple(powers))
    return msk, pk


def extract(msk, identity) -> UserSecretKey:
    """User decryption key g^(1/(gamma + H(u)))."""
    identity = as_identity(identity)
    d = _gamma_shift(msk, identity)
    return UserSecretKey(identity=identity, point=msk.g ** d.inverse())


def verify_user_key(pk, usk) -> bool:
    """Check e(usk, h^gamma * h^H(u)) = v without the master secret."""
    hu = hash_to_scalar(usk.identity)
    rhs = pk.h_powers[1] * (pk.h_powers[0] ** hu)
    return pairing(usk.point, rhs) == pk.v


def encrypt_pk(pk, members, rng=None, k=None):
    """Encrypt to S using only the public key; quadratic scalar cost.

    Returns (bk, ciphertext) where bk = v^k is the shared GT key.
    """
    members = _normalize_members(members)
    n = len(members)
    if n > pk.capacity:
        raise CapacityExceededError(f"|S| = {n} exceeds capacity {pk.capacity}")
    k = _fresh_k(rng, k)
    sigma = elementary_symmetric(_member_hashes(members))
    # prod (gamma + H(u)) = gamma^n + E_1 gamma^(n-1) + ... + E_n
    coeffs = [sigma[n - 1 - i] for i in range(n)] + [Scalar(1)]
    bases = list(pk.h_powers[: n + 1])
    cache = pk._multiexp_cache
    c3 = g2_multiexp(bases, coeffs, cache)
    c2 = g2_multiexp(bases, [k * c for c in coeffs], cache)
    c1 = pk._w_fixed.exp(-k)
    bk = pk._v_fixed.exp(k)
    return bk, BroadcastCiphertext(c1=c1, c2=c2, c3=c3)


def encrypt_msk(msk, pk, members, rng=None, k=None):
    """Encrypt to S with the master secret; linear scalar cost.

    The product prod (gamma + H(u)) is evaluated in the scalar field, so c2
    and c3 each cost a single G2 exponentiation.  Output is identical to
    ``encrypt_pk`` for the same k.
    """
    members = _normalize_members(members)
    n = len(members)
    if n > pk.capacity:
        raise CapacityExceededError(f"|S| = {n} exceeds capacity {pk.capacity}")
    k = _fresh_k(rng, k)
    prod = Scalar(1)
    for u in members:
        prod = prod * _gamma_shift(msk, u)
    c3 = pk._h_fixed.exp(prod)
    c2 = pk._h_fixed.exp(k * prod)
    c1 = pk._w_fixed.exp(-k)
    bk = pk._v_fixed.exp(k)
    return bk, BroadcastCiphertext(c1=c1, c2=c2, c3=c3)


def decrypt(pk, usk, members, ct) -> GTElem:
    """Recover bk as member usk.identity of S; quadratic scalar cost.

    Membership is checked explicitly; a caller that lies about S gets a
    value unrelated to bk, never an error oracle.
    """
    members = _normalize_members(members)
    if usk.identity not in members:
        raise NotAMemberError(f"{describe_identity(usk.identity)} not in the member set")
    others = [u for u in members if u != usk.identity]
    if not others:
        return pairing(usk.point, ct.c2)
    hashes = _member_hashes(others)
    sigma = elementary_symmetric(hashes)
    t = len(others)
    # h^(p(gamma)) where p(gamma) = (prod_{others}(gamma + H) - prod_{others} H) / gamma,
    # i.e. coefficient E_(t-1-j) on gamma^j with E_0 = 1.
    p_coeffs = [Scalar(1) if j == t - 1 else sigma[t - 2 - j] for j in range(t)]
    hp = g2_multiexp(list(pk.h_powers[:t]), p_coeffs, pk._multiexp_cache)
    denom = sigma[t - 1]  # E_t = prod of the other hashes
    val = pairing(ct.c1, hp) * pairing(usk.point, ct.c2)
    return val ** denom.inverse()


def add_user_msk(msk, ct, u_add, members) -> BroadcastCiphertext:
    """Splice u_add into an existing ciphertext; exactly 2 G2 exponentiations.

    bk is unchanged: existing members keep the same shared key.
    """
    u_add = as_identity(u_add)
    members = _normalize_members(members)
    if u_add in members:
        raise InvalidInputError(f"{describe_identity(u_add)} already a member")
    d = _gamma_shift(msk, u_add)
    return BroadcastCiphertext(c1=ct.c1, c2=ct.c2 ** d, c3=ct.c3 ** d)


def add_user_pk(pk, members, u_add, rng=None, k=None):
    """Add u_add without the master secret: full re-encryption over S + u.

    Costs the same as a fresh ``encrypt_pk`` and refreshes bk; kept as the
    baseline the constant-cost ``add_user_msk`` path is measured against.
    Returns (new bk, new ciphertext).
    """
    u_add = as_identity(u_add)
    members = _normalize_members(members)
    if u_add in members:
        raise InvalidInputError(f"{describe_identity(u_add)} already a member")
    return encrypt_pk(pk, list(members) + [u_add], rng=rng, k=k)


def remove_user_msk(msk, pk, ct, u_rem, members, rng=None, k=None):
    """Remove u_rem and refresh the shared key; constant op count.

    Divides (gamma + H(u_rem)) out of the c3 exponent, then re-randomises.
    Returns (new bk, new ciphertext).
    """
    u_rem = as_identity(u_rem)
    members = _normalize_members(members)
    if u_rem not in members:
        raise NotAMemberError(f"{describe_identity(u_rem)} not in the member set")
    if len(members) < 2:
        raise InvalidInputError("cannot remove the only member; member set must stay non-empty")
    k = _fresh_k(rng, k)
    d_inv = _gamma_shift(msk, u_rem).inverse()
    c3 = ct.c3 ** d_inv
    c2 = c3 ** k
    c1 = pk._w_fixed.exp(-k)
    bk = pk._v_fixed.exp(k)
    return bk, BroadcastCiphertext(c1=c1, c2=c2, c3=c3)


def rekey(pk, ct, rng=None, k=None):
    """Refresh bk for the unchanged member set using only the public key.

    Constant cost: c2 is rebuilt from the public product carrier c3.
    Returns (new bk, new ciphertext).
    """
    k = _fresh_k(rng, k)
    c2 = ct.c3 ** k
    c1 = pk._w_fixed.exp(-k)
    bk = pk._v_fixed.exp(k)
    return bk, BroadcastCiphertext(c1=c1, c2=c2, c3=ct.c3)
