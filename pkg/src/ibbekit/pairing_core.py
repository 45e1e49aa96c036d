"""Curve-agnostic pairing abstraction.

Exposes the three cyclic groups of a type-3 pairing, the scalar field,
hashing of identities into the scalar field, fixed-size serialization, and
multi/fixed-base exponentiation helpers.  Everything above this module is
independent of the concrete curve; the backend is BLS12-381 at the 128-bit
security level.

All group operations are written multiplicatively.  ``exp`` calls (and the
multi-exponentiation helpers) bump the global operation counters in
:mod:`ibbekit.opcount`; plain group multiplications do not, matching the
cost model where exponentiations dominate.
"""

from __future__ import annotations

import hashlib

from . import bls12381 as _bk
from . import opcount
from .errors import InvalidInputError

ORDER = int(_bk.R)

SCALAR_BYTES = 32
G1_BYTES = 96
G2_BYTES = 192
GT_BYTES = 576

CURVE_LABEL = "BLS12-381"
SECURITY_LABEL = "128-bit"

_H2S_DOMAIN = b"ibbekit:hash-to-scalar:v1"


# ---------------------------------------------------------------------------
# Scalar field

class Scalar:
    """Element of Z_r, the common order of the three groups."""

    __slots__ = ("v",)

    def __init__(self, value):
        self.v = int(value) % ORDER

    @classmethod
    def random(cls, rng):
        """Uniform non-zero scalar."""
        return cls(rng.randrange(1, ORDER))

    @classmethod
    def from_bytes(cls, data):
        if len(data) != SCALAR_BYTES:
            raise InvalidInputError(f"scalar must be {SCALAR_BYTES} bytes")
        value = int.from_bytes(data, "big")
        if value >= ORDER:
            raise InvalidInputError("scalar out of range")
        return cls(value)

    def to_bytes(self):
        return self.v.to_bytes(SCALAR_BYTES, "big")

    def __add__(self, other):
        return Scalar(self.v + other.v)

    def __sub__(self, other):
        return Scalar(self.v - other.v)

    def __neg__(self):
        return Scalar(-self.v)

    def __mul__(self, other):
        opcount.bump(opcount.SCALAR_MUL)
        return Scalar(self.v * other.v)

    def inverse(self):
        if self.v == 0:
            raise InvalidInputError("zero scalar has no inverse")
        opcount.bump(opcount.SCALAR_INV)
        return Scalar(pow(self.v, ORDER - 2, ORDER))

    def is_zero(self):
        return self.v == 0

    def __eq__(self, other):
        return isinstance(other, Scalar) and self.v == other.v

    def __hash__(self):
        return hash(("Zr", self.v))

    def __repr__(self):
        return f"Scalar({self.v:#x})"


def hash_to_scalar(identity) -> Scalar:
    """Map an identity byte-string into Z_r^*.

    Wide (512-bit) hash of domain-tag || identity || retry-counter, reduced
    mod r; the counter is incremented in the negligible case that the
    reduction hits zero, so the result is never zero.
    """
    identity = as_identity(identity)
    ctr = 0
    while True:
        digest = hashlib.sha512(_H2S_DOMAIN + identity + ctr.to_bytes(4, "big")).digest()
        value = int.from_bytes(digest, "big") % ORDER
        if value != 0:
            return Scalar(value)
        ctr += 1


def as_identity(identity) -> bytes:
    """Canonical byte form of an identity; str is encoded as UTF-8."""
    if isinstance(identity, str):
        identity = identity.encode("utf-8")
    if not isinstance(identity, (bytes, bytearray)):
        raise InvalidInputError("identity must be str or bytes")
    if len(identity) == 0:
        raise InvalidInputError("identity must be non-empty")
    return bytes(identity)


def _as_exponent(k):
    if isinstance(k, Scalar):
        return k.v
    return int(k) % ORDER


# ---------------------------------------------------------------------------
# Group elements

def _int48(x):
    return int(x).to_bytes(48, "big")


class G1Elem:
    __slots__ = ("pt",)

    def __init__(self, pt):
        self.pt = pt

    @classmethod
    def generator(cls):
        return cls(_bk.G1_GEN)

    @classmethod
    def identity(cls):
        return cls(None)

    @classmethod
    def random(cls, rng):
        """Uniform over the non-identity elements; not op-counted."""
        return cls(_bk.g1_mul(_bk.G1_GEN, rng.randrange(1, ORDER)))

    def exp(self, k):
        opcount.bump(opcount.G1_EXP)
        return G1Elem(_bk.g1_mul(self.pt, _as_exponent(k)))

    __pow__ = exp

    def __mul__(self, other):
        return G1Elem(_bk.g1_add_affine(self.pt, other.pt))

    def inverse(self):
        return G1Elem(_bk.g1_neg(self.pt))

    @property
    def is_identity(self):
        return self.pt is None

    def to_bytes(self):
        if self.pt is None:
            return b"\x40" + b"\x00" * (G1_BYTES - 1)
        return _int48(self.pt[0]) + _int48(self.pt[1])

    @classmethod
    def from_bytes(cls, data, check=True):
        if len(data) != G1_BYTES:
            raise InvalidInputError(f"G1 element must be {G1_BYTES} bytes")
        if data[0] & 0x40:
            if any(data[1:]) or data[0] != 0x40:
                raise InvalidInputError("malformed G1 identity encoding")
            return cls(None)
        x = int.from_bytes(data[:48], "big")
        y = int.from_bytes(data[48:], "big")
        if x >= int(_bk.Q) or y >= int(_bk.Q):
            raise InvalidInputError("G1 coordinate out of field range")
        pt = (x, y)
        if check and not _bk.g1_in_subgroup(pt):
            raise InvalidInputError("G1 point not in the prime-order subgroup")
        return cls(pt)

    def __eq__(self, other):
        return isinstance(other, G1Elem) and _norm_g1(self.pt) == _norm_g1(other.pt)

    def __hash__(self):
        return hash(("G1", _norm_g1(self.pt)))

    def __repr__(self):
        return f"G1Elem({'identity' if self.pt is None else hex(int(self.pt[0]))[:16] + '...'})"


def _norm_g1(pt):
    if pt is None:
        return None
    return (int(pt[0]), int(pt[1]))


def _norm_g2(pt):
    if pt is None:
        return None
    return ((int(pt[0][0]), int(pt[0][1])), (int(pt[1][0]), int(pt[1][1])))


class G2Elem:
    __slots__ = ("pt",)

    def __init__(self, pt):
        self.pt = pt

    @classmethod
    def generator(cls):
        return cls(_bk.G2_GEN)

    @classmethod
    def identity(cls):
        return cls(None)

    @classmethod
    def random(cls, rng):
        return cls(_bk.g2_mul(_bk.G2_GEN, rng.randrange(1, ORDER)))

    def exp(self, k):
        opcount.bump(opcount.G2_EXP)
        return G2Elem(_bk.g2_mul(self.pt, _as_exponent(k)))

    __pow__ = exp

    def __mul__(self, other):
        return G2Elem(_bk.g2_add_affine(self.pt, other.pt))

    def inverse(self):
        return G2Elem(_bk.g2_neg(self.pt))

    @property
    def is_identity(self):
        return self.pt is None

    def to_bytes(self):
        if self.pt is None:
            return b"\x40" + b"\x00" * (G2_BYTES - 1)
        (x0, x1), (y0, y1) = self.pt
        return _int48(x0) + _int48(x1) + _int48(y0) + _int48(y1)

    @classmethod
    def from_bytes(cls, data, check=True):
        if len(data) != G2_BYTES:
            raise InvalidInputError(f"G2 element must be {G2_BYTES} bytes")
        if data[0] & 0x40:
            if any(data[1:]) or data[0] != 0x40:
                raise InvalidInputError("malformed G2 identity encoding")
            return cls(None)
        c = [int.from_bytes(data[i * 48:(i + 1) * 48], "big") for i in range(4)]
        if any(v >= int(_bk.Q) for v in c):
            raise InvalidInputError("G2 coordinate out of field range")
        pt = ((c[0], c[1]), (c[2], c[3]))
        if check and not _bk.g2_in_subgroup(pt):
            raise InvalidInputError("G2 point not in the prime-order subgroup")
        return cls(pt)

    def __eq__(self, other):
        return isinstance(other, G2Elem) and _norm_g2(self.pt) == _norm_g2(other.pt)

    def __hash__(self):
        return hash(("G2", _norm_g2(self.pt)))

    def __repr__(self):
        return f"G2Elem({'identity' if self.pt is None else hex(int(self.pt[0][0]))[:16] + '...'})"


class GTElem:
    """Element of the order-r subgroup of Fq12*.

    Instances always lie in the cyclotomic subgroup (pairing outputs, their
    powers, or subgroup-checked deserializations), so inversion is the
    cheap conjugation.
    """

    __slots__ = ("val",)

    def __init__(self, val):
        self.val = val

    @classmethod
    def one(cls):
        return cls(_bk.FQ12_ONE)

    def exp(self, k):
        opcount.bump(opcount.GT_EXP)
        e = _as_exponent(k)
        if e == 0:
            return GTElem.one()
        return GTElem(_bk.gt_exp(self.val, e))

    __pow__ = exp

    def __mul__(self, other):
        return GTElem(_bk.fq12_mul(self.val, other.val))

    def inverse(self):
        return GTElem(_bk.fq12_conj(self.val))

    @property
    def is_one(self):
        return self.val == _bk.FQ12_ONE

    def to_bytes(self):
        (a0, a1) = self.val
        out = bytearray()
        for fq6 in (a0, a1):
            for fq2 in fq6:
                out += _int48(fq2[0]) + _int48(fq2[1])
        return bytes(out)

    @classmethod
    def from_bytes(cls, data, check=True):
        if len(data) != GT_BYTES:
            raise InvalidInputError(f"GT element must be {GT_BYTES} bytes")
        c = [int.from_bytes(data[i * 48:(i + 1) * 48], "big") for i in range(12)]
        if any(v >= int(_bk.Q) for v in c):
            raise InvalidInputError("GT coefficient out of field range")
        val = (
            ((c[0], c[1]), (c[2], c[3]), (c[4], c[5])),
            ((c[6], c[7]), (c[8], c[9]), (c[10], c[11])),
        )
        if check and not _bk.gt_in_subgroup(val):
            raise InvalidInputError("GT element not in the prime-order subgroup")
        return cls(val)

    def __eq__(self, other):
        return isinstance(other, GTElem) and _norm_gt(self.val) == _norm_gt(other.val)

    def __hash__(self):
        return hash(("GT", _norm_gt(self.val)))

    def __repr__(self):
        return "GTElem(one)" if self.is_one else "GTElem(...)"


def _norm_gt(val):
    return tuple(tuple((int(c[0]), int(c[1])) for c in fq6) for fq6 in val)


def pairing(a: G1Elem, b: G2Elem) -> GTElem:
    """Bilinear map G1 x G2 -> GT; identity inputs map to the GT identity."""
    opcount.bump(opcount.PAIRING)
    return GTElem(_bk.ate_pairing(a.pt, b.pt))


# ---------------------------------------------------------------------------
# Exponentiation helpers

class FixedBase:
    """Precomputed radix-2^6 digit table for one fixed base element.

    Each ``exp`` reduces to at most ceil(255/6) group multiplications, a
    small fraction of a cold exponentiation, and is counted exactly like
    one.
    """

    def __init__(self, elem):
        self.elem = elem
        if isinstance(elem, G1Elem):
            self._table = None if elem.pt is None else _bk.g1_powers_table(elem.pt)
            self._mul, self._wrap, self._op = _bk.g1_fixed_mul, G1Elem, opcount.G1_EXP
        elif isinstance(elem, G2Elem):
            self._table = None if elem.pt is None else _bk.g2_powers_table(elem.pt)
            self._mul, self._wrap, self._op = _bk.g2_fixed_mul, G2Elem, opcount.G2_EXP
        elif isinstance(elem, GTElem):
            self._table = _bk.gt_powers_table(elem.val)
            self._mul, self._wrap, self._op = _bk.gt_fixed_exp, GTElem, opcount.GT_EXP
        else:
            raise InvalidInputError("unsupported element type for FixedBase")

    def exp(self, k):
        opcount.bump(self._op)
        if self._table is None:
            return self._wrap(None)
        return self._wrap(self._mul(self._table, _as_exponent(k)))


class MultiExpCache:
    """Window tables for repeated multi-exponentiations over the same bases."""

    def __init__(self):
        self._g2 = {}

    def g2_table(self, pt):
        key = _norm_g2(pt)
        table = self._g2.get(key)
        if table is None:
            table = _bk._g2_table(pt)
            self._g2[key] = table
        return table


def g2_multiexp(elems, scalars, cache: MultiExpCache | None = None) -> G2Elem:
    """Product of elems[i]^scalars[i]; counted as len(elems) G2 exponentiations."""
    if len(elems) != len(scalars):
        raise InvalidInputError("mismatched multiexp lengths")
    opcount.bump(opcount.G2_EXP, len(elems))
    pts = [e.pt for e in elems]
    ks = [_as_exponent(k) for k in scalars]
    tables = None
    if cache is not None:
        tables = [None if p is None else cache.g2_table(p) for p in pts]
        live = [(t, p, k) for t, p, k in zip(tables, pts, ks) if p is not None]
        tables = [t for t, _, _ in live]
        pts = [p for _, p, _ in live]
        ks = [k for _, _, k in live]
        if not pts:
            return G2Elem(None)
    return G2Elem(_bk.g2_multi_mul(pts, ks, tables))
