"""Scalar field, group wrappers, hashing and serialization contracts."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ibbekit import opcount
from ibbekit.bls12381 import Q
from ibbekit.errors import InvalidInputError
from ibbekit.pairing_core import (
    G1_BYTES,
    G2_BYTES,
    GT_BYTES,
    ORDER,
    SCALAR_BYTES,
    FixedBase,
    G1Elem,
    G2Elem,
    GTElem,
    Scalar,
    as_identity,
    g2_multiexp,
    hash_to_scalar,
    pairing,
)

ints = st.integers(min_value=0, max_value=2 * ORDER)


# ---------------------------------------------------------------------------
# Scalar field

@given(a=ints, b=ints)
def test_scalar_arithmetic_matches_integers_mod_r(a, b):
    sa, sb = Scalar(a), Scalar(b)
    assert (sa + sb).v == (a + b) % ORDER
    assert (sa - sb).v == (a - b) % ORDER
    assert (sa * sb).v == (a * b) % ORDER
    assert (-sa).v == -a % ORDER


@given(a=st.integers(min_value=1, max_value=ORDER - 1))
def test_scalar_inverse_is_multiplicative_inverse(a):
    s = Scalar(a)
    assert (s * s.inverse()).v == 1


def test_zero_scalar_has_no_inverse():
    with pytest.raises(InvalidInputError):
        Scalar(0).inverse()


def test_scalar_bytes_round_trip_and_range_check():
    s = Scalar(0x1234567890ABCDEF)
    assert Scalar.from_bytes(s.to_bytes()) == s
    assert len(s.to_bytes()) == SCALAR_BYTES
    with pytest.raises(InvalidInputError):
        Scalar.from_bytes(ORDER.to_bytes(SCALAR_BYTES, "big"))
    with pytest.raises(InvalidInputError):
        Scalar.from_bytes(b"\x00" * (SCALAR_BYTES - 1))


def test_scalar_random_is_nonzero():
    rng = random.Random(0)
    assert all(not Scalar.random(rng).is_zero() for _ in range(100))


# ---------------------------------------------------------------------------
# Identity hashing

def test_hash_to_scalar_deterministic_and_identity_sensitive():
    assert hash_to_scalar(b"alice") == hash_to_scalar("alice")
    assert hash_to_scalar(b"alice") != hash_to_scalar(b"bob")


def test_hash_to_scalar_never_zero_under_fuzz():
    # 10^5 distinct inputs; zero would require a SHA-512 preimage landing
    # exactly on a multiple of r
    for i in range(100_000):
        if hash_to_scalar(i.to_bytes(4, "big")).is_zero():
            pytest.fail(f"hash_to_scalar hit zero at input {i}")


def test_as_identity_canonicalization():
    assert as_identity("héllo") == "héllo".encode("utf-8")
    assert as_identity(bytearray(b"x")) == b"x"
    with pytest.raises(InvalidInputError):
        as_identity(b"")
    with pytest.raises(InvalidInputError):
        as_identity(42)


# ---------------------------------------------------------------------------
# Group element contracts

def test_element_serialized_sizes_are_constants():
    rng = random.Random(1)
    g1 = G1Elem.random(rng)
    g2 = G2Elem.random(rng)
    gt = pairing(g1, g2)
    assert len(g1.to_bytes()) == G1_BYTES == 96
    assert len(g2.to_bytes()) == G2_BYTES == 192
    assert len(gt.to_bytes()) == GT_BYTES == 576
    assert len(Scalar(7).to_bytes()) == SCALAR_BYTES == 32


def test_round_trip_all_four_element_kinds():
    rng = random.Random(2)
    g1 = G1Elem.random(rng)
    g2 = G2Elem.random(rng)
    gt = pairing(g1, g2)
    s = Scalar.random(rng)
    assert G1Elem.from_bytes(g1.to_bytes()) == g1
    assert G2Elem.from_bytes(g2.to_bytes()) == g2
    assert GTElem.from_bytes(gt.to_bytes()) == gt
    assert Scalar.from_bytes(s.to_bytes()) == s


def test_identity_elements_round_trip():
    for cls in (G1Elem, G2Elem):
        blob = cls.identity().to_bytes()
        assert cls.from_bytes(blob).is_identity
    assert GTElem.from_bytes(GTElem.one().to_bytes()).is_one


def test_malformed_identity_encoding_rejected():
    blob = bytearray(G1Elem.identity().to_bytes())
    blob[5] = 1
    with pytest.raises(InvalidInputError):
        G1Elem.from_bytes(bytes(blob))


def _g1_point_outside_subgroup():
    """Smallest-x curve point that is not in the order-r subgroup.

    G1's cofactor is ~2^125, so nearly every curve point qualifies; found
    by scanning x and taking a square root (q = 3 mod 4).
    """
    q = int(Q)
    assert q % 4 == 3
    from ibbekit.bls12381 import g1_in_subgroup, g1_on_curve

    x = 2
    while True:
        rhs = (x * x * x + 4) % q
        y = pow(rhs, (q + 1) // 4, q)
        if y * y % q == rhs:
            pt = (x, y)
            assert g1_on_curve(pt)
            if not g1_in_subgroup(pt):
                return pt
        x += 1


def test_non_subgroup_g1_point_rejected_on_deserialize():
    x, y = _g1_point_outside_subgroup()
    blob = x.to_bytes(48, "big") + y.to_bytes(48, "big")
    with pytest.raises(InvalidInputError):
        G1Elem.from_bytes(blob)
    # the escape hatch used by trusted loaders skips the subgroup scan
    assert G1Elem.from_bytes(blob, check=False).pt == (x, y)


def test_corrupted_g2_encoding_rejected():
    g2 = G2Elem.random(random.Random(3))
    blob = bytearray(g2.to_bytes())
    blob[-1] ^= 1
    with pytest.raises(InvalidInputError):
        G2Elem.from_bytes(bytes(blob))


def test_out_of_range_coordinate_rejected():
    blob = (int(Q)).to_bytes(48, "big") + (1).to_bytes(48, "big")
    with pytest.raises(InvalidInputError):
        G1Elem.from_bytes(blob)


def test_non_subgroup_gt_value_rejected():
    gt = pairing(G1Elem.generator(), G2Elem.generator())
    blob = bytearray(gt.to_bytes())
    blob[47] ^= 1  # still a valid field element, no longer order r
    with pytest.raises(InvalidInputError):
        GTElem.from_bytes(bytes(blob))


def test_wrong_length_rejected_everywhere():
    for cls, size in ((G1Elem, G1_BYTES), (G2Elem, G2_BYTES), (GTElem, GT_BYTES)):
        with pytest.raises(InvalidInputError):
            cls.from_bytes(b"\x00" * (size + 1))


# ---------------------------------------------------------------------------
# Pairing and exponentiation helpers

def test_pairing_bilinearity_100_random_pairs():
    rng = random.Random(4)
    g1 = G1Elem.generator()
    g2 = G2Elem.generator()
    base = pairing(g1, g2)
    for _ in range(100):
        a, b = Scalar.random(rng), Scalar.random(rng)
        assert pairing(g1 ** a, g2 ** b) == base ** (a.v * b.v % ORDER)


def test_pairing_identity_absorbs():
    assert pairing(G1Elem.identity(), G2Elem.generator()).is_one
    assert pairing(G1Elem.generator(), G2Elem.identity()).is_one


def test_exp_agrees_with_repeated_multiplication():
    rng = random.Random(5)
    for elem in (G1Elem.random(rng), G2Elem.random(rng)):
        cube = elem * elem * elem
        assert elem ** Scalar(3) == cube
    gt = pairing(G1Elem.random(rng), G2Elem.random(rng))
    assert gt ** Scalar(3) == gt * gt * gt
    assert (gt * gt.inverse()).is_one


def test_fixed_base_matches_plain_exp():
    rng = random.Random(6)
    for elem in (G1Elem.random(rng), G2Elem.random(rng),
                 pairing(G1Elem.random(rng), G2Elem.random(rng))):
        fixed = FixedBase(elem)
        for k in (Scalar(1), Scalar(63), Scalar(64), Scalar.random(rng)):
            assert fixed.exp(k) == elem ** k


def test_fixed_base_on_identity_element():
    fixed = FixedBase(G2Elem.identity())
    assert fixed.exp(Scalar(12)).is_identity


def test_multiexp_equals_product_and_counts_len(env8):
    _, pk = env8
    rng = random.Random(7)
    elems = [G2Elem.random(rng) for _ in range(4)]
    ks = [Scalar.random(rng) for _ in range(4)]
    with opcount.capture() as ops:
        got = g2_multiexp(elems, ks)
    assert ops[opcount.G2_EXP] == 4
    want = elems[0] ** ks[0]
    for e, k in zip(elems[1:], ks[1:]):
        want = want * (e ** k)
    assert got == want
    with pytest.raises(InvalidInputError):
        g2_multiexp(elems, ks[:-1])


def test_op_counters_track_exponentiations():
    rng = random.Random(8)
    g1, g2 = G1Elem.random(rng), G2Elem.random(rng)
    with opcount.capture() as ops:
        g1 ** Scalar(5)
        g2 ** Scalar(5)
        pairing(g1, g2)
        Scalar(3) * Scalar(4)
        Scalar(3).inverse()
    assert ops[opcount.G1_EXP] == 1
    assert ops[opcount.G2_EXP] == 1
    assert ops[opcount.PAIRING] == 1
    assert ops[opcount.SCALAR_MUL] == 1
    assert ops[opcount.SCALAR_INV] == 1


def test_suspended_blocks_counting():
    with opcount.capture() as ops:
        with opcount.suspended():
            Scalar(3) * Scalar(4)
    assert ops == {}
