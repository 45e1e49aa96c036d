"""Optimal ate pairing e: G1 x G2 -> GT for BLS12-381.

The Miller loop runs in affine coordinates on the twist; each line is
evaluated at the G1 argument and embedded into Fq12 through the untwist
(x', y') -> (x'/w^2, y'/w^3), which leaves only three non-zero Fq2 slots.
Lines are scaled by the subfield constant XI, which the final
exponentiation erases.

The final exponentiation uses the factorisation

    3 * (q^4 - q^2 + 1)/r = (x-1)^2 * (x+q) * (x^2 + q^2 - 1) + 3

(verified against the integer parameters in the tests), so the function
computes e(P,Q) = f^(3*(q^12-1)/r).  The cube of a pairing is itself a
non-degenerate bilinear pairing since gcd(3, r) = 1; all consumers only
rely on those two properties.
"""

from .fields import (
    Q,
    R,
    BLS_X,
    FQ12_ONE,
    fq2_add,
    fq2_sub,
    fq2_neg,
    fq2_mul,
    fq2_sqr,
    fq2_muls,
    fq2_inv,
    FQ2_ZERO,
    fq12_mul,
    fq12_sqr,
    fq12_inv,
    fq12_conj,
    fq12_frobenius,
    fq12_frobenius2,
    fq12_pow,
)

_X_ABS = -BLS_X
_X_BITS = bin(_X_ABS)[3:]  # MSB-first, top bit implicit


def _line(t, lam, xp, yp_xi):
    """Fq12 line value through t with twist slope lam, evaluated at P.

    yp_xi is the precomputed Fq2 value XI * (-yP).
    """
    x1, y1 = t
    c1 = fq2_muls(lam, xp)
    c3 = fq2_sub(y1, fq2_mul(lam, x1))
    return ((yp_xi, FQ2_ZERO, FQ2_ZERO), (FQ2_ZERO, c3, c1))


def _dbl_step(t):
    x1, y1 = t
    lam = fq2_mul(fq2_muls(fq2_sqr(x1), 3), fq2_inv(fq2_add(y1, y1)))
    x3 = fq2_sub(fq2_sqr(lam), fq2_add(x1, x1))
    y3 = fq2_sub(fq2_mul(lam, fq2_sub(x1, x3)), y1)
    return (x3, y3), lam


def _add_step(t, q):
    x1, y1 = t
    x2, y2 = q
    lam = fq2_mul(fq2_sub(y2, y1), fq2_inv(fq2_sub(x2, x1)))
    x3 = fq2_sub(fq2_sub(fq2_sqr(lam), x1), x2)
    y3 = fq2_sub(fq2_mul(lam, fq2_sub(x1, x3)), y1)
    return (x3, y3), lam


def miller_loop(p, q):
    xp, yp = p
    yp_xi = (-yp % Q, -yp % Q)  # XI * (-yP) with XI = 1 + u
    f = FQ12_ONE
    t = q
    for bit in _X_BITS:
        t_prev = t
        t, lam = _dbl_step(t)
        f = fq12_mul(fq12_sqr(f), _line(t_prev, lam, xp, yp_xi))
        if bit == "1":
            t_prev = t
            t, lam = _add_step(t, q)
            f = fq12_mul(f, _line(t_prev, lam, xp, yp_xi))
    # BLS parameter is negative: invert, which is conjugation up to the
    # (q^6 - 1) factor applied next.
    return fq12_conj(f)


def _pow_x_abs(f):
    """f^|x| by square-and-multiply; |x| has Hamming weight 6."""
    result = f
    for bit in _X_BITS:
        result = fq12_sqr(result)
        if bit == "1":
            result = fq12_mul(result, f)
    return result


def final_exponentiation(f):
    # Easy part: f^((q^6 - 1)(q^2 + 1)).
    t = fq12_mul(fq12_conj(f), fq12_inv(f))
    f = fq12_mul(fq12_frobenius2(t), t)
    # Hard part (cyclotomic subgroup, so conjugation inverts).
    t1 = fq12_conj(fq12_mul(_pow_x_abs(f), f))            # f^(x-1)
    t2 = fq12_conj(fq12_mul(_pow_x_abs(t1), t1))          # ^(x-1)
    t3 = fq12_mul(fq12_conj(_pow_x_abs(t2)), fq12_frobenius(t2))   # ^(x+q)
    t4 = fq12_mul(
        fq12_mul(_pow_x_abs(_pow_x_abs(t3)), fq12_frobenius2(t3)),
        fq12_conj(t3),
    )                                                     # ^(x^2+q^2-1)
    return fq12_mul(t4, fq12_mul(fq12_sqr(f), f))         # * f^3


def ate_pairing(p, q):
    """Full pairing; accepts None for either argument (returns GT one)."""
    if p is None or q is None:
        return FQ12_ONE
    return final_exponentiation(miller_loop(p, q))


# ---------------------------------------------------------------------------
# GT (multiplicative subgroup of Fq12) exponentiation helpers

def gt_exp(f, k):
    k = int(k) % int(R)
    if k == 0:
        return FQ12_ONE
    table = [f]
    for _ in range(14):
        table.append(fq12_mul(table[-1], f))
    acc = None
    top = (k.bit_length() + 3) // 4 * 4 - 4
    for shift in range(top, -1, -4):
        if acc is not None:
            acc = fq12_sqr(fq12_sqr(fq12_sqr(fq12_sqr(acc))))
        digit = (k >> shift) & 0xF
        if digit:
            acc = table[digit - 1] if acc is None else fq12_mul(acc, table[digit - 1])
    return acc


_FIXED_WINDOW = 6
_FIXED_MASK = (1 << _FIXED_WINDOW) - 1


def gt_powers_table(f):
    """Chunked fixed-base table: rows[j][d-1] = f^(d << 6j)."""
    n_chunks = -(-int(R).bit_length() // _FIXED_WINDOW)
    rows = []
    base = f
    for j in range(n_chunks):
        row = [base]
        for _ in range(_FIXED_MASK - 1):
            row.append(fq12_mul(row[-1], base))
        rows.append(row)
        if j + 1 < n_chunks:
            for _ in range(_FIXED_WINDOW):
                base = fq12_sqr(base)
    return rows


def gt_fixed_exp(rows, k):
    k = int(k) % int(R)
    acc = None
    j = 0
    while k:
        digit = k & _FIXED_MASK
        if digit:
            part = rows[j][digit - 1]
            acc = part if acc is None else fq12_mul(acc, part)
        k >>= _FIXED_WINDOW
        j += 1
    return FQ12_ONE if acc is None else acc


def gt_in_subgroup(f):
    return fq12_pow(f, int(R)) == FQ12_ONE
