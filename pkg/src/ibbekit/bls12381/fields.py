"""Tower field arithmetic for BLS12-381.

Layout: Fq elements are plain integers reduced mod Q.  Extension elements
are nested tuples of integers:

    Fq2  = (c0, c1)            c0 + c1*u,          u^2 = -1
    Fq6  = (a0, a1, a2)        a_i in Fq2,         v^3 = XI = u + 1
    Fq12 = (b0, b1)            b_i in Fq6,         w^2 = v

Functions are free-standing and operate on these tuples directly; the hot
paths avoid any class dispatch.  When gmpy2 is importable the constants are
mpz, which makes every mulmod noticeably cheaper; the code is agnostic.
"""

try:
    from gmpy2 import mpz, invert as _gmpy_invert

    def _int(x):
        return mpz(x)

    def fq_inv(a):
        return int(_gmpy_invert(a, Q))

except ImportError:  # pragma: no cover - exercised only without gmpy2
    def _int(x):
        return x

    def fq_inv(a):
        return pow(a, Q - 2, Q)


# Base field modulus and curve group order.
Q = _int(0x1A0111EA397FE69A4B1BA7B6434BACD764774B84F38512BF6730D2A0F6B0F6241EABFFFEB153FFFFB9FEFFFFFFFFAAAB)
R = _int(0x73EDA753299D7D483339D80809A1D80553BDA402FFFE5BFEFFFFFFFF00000001)

# BLS generator parameter; the curve family is instantiated at x < 0.
BLS_X = -0xD201000000010000

FQ2_ONE = (_int(1), _int(0))
FQ2_ZERO = (_int(0), _int(0))
FQ6_ZERO = (FQ2_ZERO, FQ2_ZERO, FQ2_ZERO)
FQ6_ONE = (FQ2_ONE, FQ2_ZERO, FQ2_ZERO)
FQ12_ONE = (FQ6_ONE, FQ6_ZERO)


# ---------------------------------------------------------------------------
# Fq2

def fq2_add(a, b):
    return ((a[0] + b[0]) % Q, (a[1] + b[1]) % Q)


def fq2_sub(a, b):
    return ((a[0] - b[0]) % Q, (a[1] - b[1]) % Q)


def fq2_neg(a):
    return (-a[0] % Q, -a[1] % Q)


def fq2_conj(a):
    return (a[0], -a[1] % Q)


def fq2_mul(a, b):
    a0, a1 = a
    b0, b1 = b
    t0 = a0 * b0
    t1 = a1 * b1
    # Karatsuba: cross term from (a0+a1)(b0+b1) - t0 - t1
    return ((t0 - t1) % Q, ((a0 + a1) * (b0 + b1) - t0 - t1) % Q)


def fq2_sqr(a):
    a0, a1 = a
    # (a0 + a1 u)^2 = (a0+a1)(a0-a1) + 2 a0 a1 u
    return ((a0 + a1) * (a0 - a1) % Q, 2 * a0 * a1 % Q)


def fq2_muls(a, s):
    """Multiply by an Fq scalar."""
    return (a[0] * s % Q, a[1] * s % Q)


def fq2_mul_xi(a):
    """Multiply by XI = 1 + u, the Fq6 non-residue."""
    a0, a1 = a
    return ((a0 - a1) % Q, (a0 + a1) % Q)


def fq2_inv(a):
    a0, a1 = a
    d = fq_inv((a0 * a0 + a1 * a1) % Q)
    return (a0 * d % Q, -a1 * d % Q)


def fq2_pow(a, e):
    result = FQ2_ONE
    base = a
    while e:
        if e & 1:
            result = fq2_mul(result, base)
        base = fq2_sqr(base)
        e >>= 1
    return result


# ---------------------------------------------------------------------------
# Fq6

def fq6_add(a, b):
    return (fq2_add(a[0], b[0]), fq2_add(a[1], b[1]), fq2_add(a[2], b[2]))


def fq6_sub(a, b):
    return (fq2_sub(a[0], b[0]), fq2_sub(a[1], b[1]), fq2_sub(a[2], b[2]))


def fq6_neg(a):
    return (fq2_neg(a[0]), fq2_neg(a[1]), fq2_neg(a[2]))


def fq6_mul(a, b):
    a0, a1, a2 = a
    b0, b1, b2 = b
    t0 = fq2_mul(a0, b0)
    t1 = fq2_mul(a1, b1)
    t2 = fq2_mul(a2, b2)
    # Toom-style interpolation with 6 Fq2 multiplications total.
    c0 = fq2_add(t0, fq2_mul_xi(fq2_sub(fq2_mul(fq2_add(a1, a2), fq2_add(b1, b2)), fq2_add(t1, t2))))
    c1 = fq2_add(fq2_sub(fq2_mul(fq2_add(a0, a1), fq2_add(b0, b1)), fq2_add(t0, t1)), fq2_mul_xi(t2))
    c2 = fq2_add(fq2_sub(fq2_mul(fq2_add(a0, a2), fq2_add(b0, b2)), fq2_add(t0, t2)), t1)
    return (c0, c1, c2)


def fq6_sqr(a):
    return fq6_mul(a, a)


def fq6_mul_by_v(a):
    """Multiply by v; shifts coefficients and wraps the top one through XI."""
    return (fq2_mul_xi(a[2]), a[0], a[1])


def fq6_inv(a):
    a0, a1, a2 = a
    c0 = fq2_sub(fq2_sqr(a0), fq2_mul_xi(fq2_mul(a1, a2)))
    c1 = fq2_sub(fq2_mul_xi(fq2_sqr(a2)), fq2_mul(a0, a1))
    c2 = fq2_sub(fq2_sqr(a1), fq2_mul(a0, a2))
    f = fq2_inv(fq2_add(fq2_mul(a0, c0), fq2_mul_xi(fq2_add(fq2_mul(a2, c1), fq2_mul(a1, c2)))))
    return (fq2_mul(c0, f), fq2_mul(c1, f), fq2_mul(c2, f))


# ---------------------------------------------------------------------------
# Fq12

def fq12_add(a, b):
    return (fq6_add(a[0], b[0]), fq6_add(a[1], b[1]))


def fq12_mul(a, b):
    a0, a1 = a
    b0, b1 = b
    t0 = fq6_mul(a0, b0)
    t1 = fq6_mul(a1, b1)
    c0 = fq6_add(t0, fq6_mul_by_v(t1))
    c1 = fq6_sub(fq6_sub(fq6_mul(fq6_add(a0, a1), fq6_add(b0, b1)), t0), t1)
    return (c0, c1)


def fq12_sqr(a):
    a0, a1 = a
    t = fq6_mul(a0, a1)
    c0 = fq6_sub(fq6_sub(fq6_mul(fq6_add(a0, a1), fq6_add(a0, fq6_mul_by_v(a1))), t), fq6_mul_by_v(t))
    c1 = fq6_add(t, t)
    return (c0, c1)


def fq12_conj(a):
    """Conjugation over Fq6; equals the q^6 Frobenius."""
    return (a[0], fq6_neg(a[1]))


def fq12_inv(a):
    a0, a1 = a
    d = fq6_inv(fq6_sub(fq6_sqr(a0), fq6_mul_by_v(fq6_sqr(a1))))
    return (fq6_mul(a0, d), fq6_neg(fq6_mul(a1, d)))


def fq12_pow(a, e):
    if e < 0:
        a = fq12_inv(a)
        e = -e
    result = FQ12_ONE
    base = a
    while e:
        if e & 1:
            result = fq12_mul(result, base)
        base = fq12_sqr(base)
        e >>= 1
    return result


def fq12_eq_one(a):
    return a == FQ12_ONE


# ---------------------------------------------------------------------------
# Frobenius endomorphism x -> x^q on Fq12.
#
# Writing an element over the basis {1, w, w^2=v, w^3, w^4=v^2, w^5} with Fq2
# coefficients c_e (e = 2i + j for the (v^i w^j) slot), the map is
# c_e -> conj(c_e) * XI^(e (q-1) / 6).  The six constants are precomputed.

def _frob_coeffs():
    exp = (int(Q) - 1) // 6
    xi = (_int(1), _int(1))
    w1 = fq2_pow(xi, exp)
    coeffs = [FQ2_ONE]
    for _ in range(5):
        coeffs.append(fq2_mul(coeffs[-1], w1))
    return tuple(coeffs)


FROB_W = _frob_coeffs()


def fq12_frobenius(a):
    (c0, c2, c4), (c1, c3, c5) = a
    c = [fq2_conj(x) for x in (c0, c1, c2, c3, c4, c5)]
    out = [c[0]] + [fq2_mul(c[e], FROB_W[e]) for e in range(1, 6)]
    return ((out[0], out[2], out[4]), (out[1], out[3], out[5]))


def fq12_frobenius2(a):
    return fq12_frobenius(fq12_frobenius(a))
