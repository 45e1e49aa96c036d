"""Point arithmetic on BLS12-381 G1 and G2.

G1 lives on E: y^2 = x^3 + 4 over Fq, G2 on the sextic twist
E': y^2 = x^3 + 4(u+1) over Fq2.  Affine points are (x, y) tuples with the
point at infinity represented as None; internal routines use Jacobian
triples (X, Y, Z) with x = X/Z^2, y = Y/Z^3.

The window loops (single scalar, simultaneous multi-scalar, fixed-base) are
written once and parameterised by the primitive double/add ops so both
groups share them.
"""

from .fields import (
    Q,
    R,
    BLS_X,
    _int,
    fq_inv,
    fq2_add,
    fq2_sub,
    fq2_neg,
    fq2_conj,
    fq2_mul,
    fq2_sqr,
    fq2_muls,
    fq2_pow,
    fq2_inv,
    FQ2_ONE,
    FQ2_ZERO,
)


def _fq2_dbl(a):
    return ((a[0] + a[0]) % Q, (a[1] + a[1]) % Q)

# Standard generators.
G1_GEN = (
    _int(0x17F1D3A73197D7942695638C4FA9AC0FC3688C4F9774B905A14E3A3F171BAC586C55E83FF97A1AEFFB3AF00ADB22C6BB),
    _int(0x08B3F481E3AAA0F1A09E30ED741D8AE4FCF5E095D5D00AF600DB18CB2C04B3EDD03CC744A2888AE40CAA232946C5E7E1),
)
G2_GEN = (
    (
        _int(352701069587466618187139116011060144890029952792775240219908644239793785735715026873347600343865175952761926303160),
        _int(3059144344244213709971259814753781636986470325476647558659373206291635324768958432433509563104347017837885763365758),
    ),
    (
        _int(1985150602287291935568054521177171638300868978215655730859378665066344726373823718423869104263333984641494340347905),
        _int(927553665492332455747201965776037880757740193453592970025027978793976877002675564980949289727957565575433344219582),
    ),
)

B1 = _int(4)
B2 = (_int(4), _int(4))


# ---------------------------------------------------------------------------
# G1 Jacobian primitives (inlined Fq arithmetic)

def _g1_dbl(p):
    if p is None:
        return None
    x, y, z = p
    a = x * x % Q
    b = y * y % Q
    c = b * b % Q
    xb = x + b
    d = 2 * (xb * xb - a - c) % Q
    e = 3 * a % Q
    x3 = (e * e - 2 * d) % Q
    y3 = (e * (d - x3) - 8 * c) % Q
    z3 = 2 * y * z % Q
    if z3 == 0:
        return None
    return (x3, y3, z3)


def _g1_add(p, q):
    if p is None:
        return q
    if q is None:
        return p
    x1, y1, z1 = p
    x2, y2, z2 = q
    z1z1 = z1 * z1 % Q
    z2z2 = z2 * z2 % Q
    u1 = x1 * z2z2 % Q
    u2 = x2 * z1z1 % Q
    s1 = y1 * z2 * z2z2 % Q
    s2 = y2 * z1 * z1z1 % Q
    h = (u2 - u1) % Q
    if h == 0:
        if (s2 - s1) % Q == 0:
            return _g1_dbl(p)
        return None
    i = 4 * h * h % Q
    j = h * i % Q
    rr = 2 * (s2 - s1) % Q
    v = u1 * i % Q
    x3 = (rr * rr - j - 2 * v) % Q
    y3 = (rr * (v - x3) - 2 * s1 * j) % Q
    z3 = ((z1 + z2) * (z1 + z2) - z1z1 - z2z2) * h % Q
    return (x3, y3, z3)


def _g1_madd(p, q_aff):
    """Mixed addition with an affine second operand."""
    if q_aff is None:
        return p
    x2, y2 = q_aff
    if p is None:
        return (x2, y2, _int(1))
    x1, y1, z1 = p
    z1z1 = z1 * z1 % Q
    u2 = x2 * z1z1 % Q
    s2 = y2 * z1 * z1z1 % Q
    h = (u2 - x1) % Q
    if h == 0:
        if (s2 - y1) % Q == 0:
            return _g1_dbl(p)
        return None
    hh = h * h % Q
    i = 4 * hh % Q
    j = h * i % Q
    rr = 2 * (s2 - y1) % Q
    v = x1 * i % Q
    x3 = (rr * rr - j - 2 * v) % Q
    y3 = (rr * (v - x3) - 2 * y1 * j) % Q
    z3 = ((z1 + h) * (z1 + h) - z1z1 - hh) % Q
    if z3 == 0:
        return None
    return (x3, y3, z3)


def _g1_to_affine(p):
    if p is None:
        return None
    x, y, z = p
    zi = fq_inv(z)
    zi2 = zi * zi % Q
    return (x * zi2 % Q, y * zi2 * zi % Q)


def _g1_batch_affine(points):
    """Normalise many Jacobian points with a single field inversion."""
    zs = [p[2] for p in points]
    prefix = [None] * len(zs)
    acc = _int(1)
    for i, z in enumerate(zs):
        prefix[i] = acc
        acc = acc * z % Q
    inv = fq_inv(acc)
    out = [None] * len(points)
    for i in range(len(zs) - 1, -1, -1):
        zi = inv * prefix[i] % Q
        inv = inv * zs[i] % Q
        zi2 = zi * zi % Q
        x, y, _ = points[i]
        out[i] = (x * zi2 % Q, y * zi2 * zi % Q)
    return out


def g1_neg(p):
    if p is None:
        return None
    return (p[0], -p[1] % Q)


def g1_add_affine(p, q):
    if p is None:
        return q
    return _g1_to_affine(_g1_madd((p[0], p[1], _int(1)), q))


def g1_on_curve(p):
    if p is None:
        return True
    x, y = p
    return (y * y - (x * x * x + B1)) % Q == 0


# ---------------------------------------------------------------------------
# G2 Jacobian primitives (coordinates in Fq2)

def _g2_dbl(p):
    if p is None:
        return None
    x, y, z = p
    a = fq2_sqr(x)
    b = fq2_sqr(y)
    c = fq2_sqr(b)
    t = fq2_sqr(fq2_add(x, b))
    d = _fq2_dbl(fq2_sub(fq2_sub(t, a), c))
    e = fq2_add(fq2_add(a, a), a)
    x3 = fq2_sub(fq2_sqr(e), fq2_add(d, d))
    c8 = fq2_muls(c, 8)
    y3 = fq2_sub(fq2_mul(e, fq2_sub(d, x3)), c8)
    z3 = fq2_mul(fq2_add(y, y), z)
    if z3 == FQ2_ZERO:
        return None
    return (x3, y3, z3)


def _g2_add(p, q):
    if p is None:
        return q
    if q is None:
        return p
    x1, y1, z1 = p
    x2, y2, z2 = q
    z1z1 = fq2_sqr(z1)
    z2z2 = fq2_sqr(z2)
    u1 = fq2_mul(x1, z2z2)
    u2 = fq2_mul(x2, z1z1)
    s1 = fq2_mul(fq2_mul(y1, z2), z2z2)
    s2 = fq2_mul(fq2_mul(y2, z1), z1z1)
    h = fq2_sub(u2, u1)
    if h == FQ2_ZERO:
        if fq2_sub(s2, s1) == FQ2_ZERO:
            return _g2_dbl(p)
        return None
    h2 = fq2_add(h, h)
    i = fq2_sqr(h2)
    j = fq2_mul(h, i)
    rr = _fq2_dbl(fq2_sub(s2, s1))
    v = fq2_mul(u1, i)
    x3 = fq2_sub(fq2_sub(fq2_sqr(rr), j), fq2_add(v, v))
    s1j = fq2_mul(s1, j)
    y3 = fq2_sub(fq2_mul(rr, fq2_sub(v, x3)), fq2_add(s1j, s1j))
    z3 = fq2_mul(fq2_sub(fq2_sub(fq2_sqr(fq2_add(z1, z2)), z1z1), z2z2), h)
    return (x3, y3, z3)


def _g2_madd(p, q_aff):
    if q_aff is None:
        return p
    x2, y2 = q_aff
    if p is None:
        return (x2, y2, FQ2_ONE)
    x1, y1, z1 = p
    z1z1 = fq2_sqr(z1)
    u2 = fq2_mul(x2, z1z1)
    s2 = fq2_mul(fq2_mul(y2, z1), z1z1)
    h = fq2_sub(u2, x1)
    if h == FQ2_ZERO:
        if fq2_sub(s2, y1) == FQ2_ZERO:
            return _g2_dbl(p)
        return None
    hh = fq2_sqr(h)
    i = fq2_muls(hh, 4)
    j = fq2_mul(h, i)
    rr = _fq2_dbl(fq2_sub(s2, y1))
    v = fq2_mul(x1, i)
    x3 = fq2_sub(fq2_sub(fq2_sqr(rr), j), fq2_add(v, v))
    y1j = fq2_mul(y1, j)
    y3 = fq2_sub(fq2_mul(rr, fq2_sub(v, x3)), fq2_add(y1j, y1j))
    z3 = fq2_sub(fq2_sub(fq2_sqr(fq2_add(z1, h)), z1z1), hh)
    if z3 == FQ2_ZERO:
        return None
    return (x3, y3, z3)


def _g2_to_affine(p):
    if p is None:
        return None
    x, y, z = p
    zi = fq2_inv(z)
    zi2 = fq2_sqr(zi)
    return (fq2_mul(x, zi2), fq2_mul(fq2_mul(y, zi2), zi))


def _g2_batch_affine(points):
    zs = [p[2] for p in points]
    prefix = [None] * len(zs)
    acc = FQ2_ONE
    for i, z in enumerate(zs):
        prefix[i] = acc
        acc = fq2_mul(acc, z)
    inv = fq2_inv(acc)
    out = [None] * len(points)
    for i in range(len(zs) - 1, -1, -1):
        zi = fq2_mul(inv, prefix[i])
        inv = fq2_mul(inv, zs[i])
        zi2 = fq2_sqr(zi)
        x, y, _ = points[i]
        out[i] = (fq2_mul(x, zi2), fq2_mul(fq2_mul(y, zi2), zi))
    return out


def g2_neg(p):
    if p is None:
        return None
    return (p[0], fq2_neg(p[1]))


def g2_add_affine(p, q):
    if p is None:
        return q
    return _g2_to_affine(_g2_madd((p[0], p[1], FQ2_ONE), q))


def g2_on_curve(p):
    if p is None:
        return True
    x, y = p
    return fq2_sub(fq2_sqr(y), fq2_add(fq2_mul(fq2_sqr(x), x), B2)) == FQ2_ZERO


# ---------------------------------------------------------------------------
# Shared window loops

_WINDOW = 4


def _build_table(p_aff, dbl, madd, batch_affine):
    """Affine table [i * P for i in 1..15] for 4-bit windows."""
    one = FQ2_ONE if isinstance(p_aff[0], tuple) else _int(1)
    jac = (p_aff[0], p_aff[1], one)
    rows = [jac]
    for _ in range(14):
        rows.append(madd(rows[-1], p_aff))
    return batch_affine(rows)


def _g1_table(p_aff):
    return _build_table(p_aff, _g1_dbl, _g1_madd, _g1_batch_affine)


def _g2_table(p_aff):
    return _build_table(p_aff, _g2_dbl, _g2_madd, _g2_batch_affine)


def _window_mul(p_aff, k, dbl, madd, to_affine, table_fn, table=None):
    k = int(k) % int(R)
    if k == 0 or p_aff is None:
        return None
    if table is None:
        table = table_fn(p_aff)
    acc = None
    started = False
    for shift in range((k.bit_length() + _WINDOW - 1) // _WINDOW * _WINDOW - _WINDOW, -1, -_WINDOW):
        if started:
            acc = dbl(dbl(dbl(dbl(acc))))
        digit = (k >> shift) & 0xF
        if digit:
            acc = madd(acc, table[digit - 1])
            started = True
    return to_affine(acc)


def g1_mul(p_aff, k, table=None):
    return _window_mul(p_aff, k, _g1_dbl, _g1_madd, _g1_to_affine, _g1_table, table)


# ---------------------------------------------------------------------------
# GLS endomorphism path for single-scalar G2 multiplication
#
# The untwist-Frobenius-twist map acts on the r-torsion of the twist as
# multiplication by BLS_X, so a full-width scalar splits into four signed
# digits of ~64 bits in radix BLS_X.  A joint NAF loop over P, psi(P),
# psi^2(P), psi^3(P) then needs ~66 doublings instead of ~255.  Only valid
# on subgroup points; g2_in_subgroup keeps the plain window loop.

_PSI_CX = fq2_inv(fq2_pow((_int(1), _int(1)), (Q - 1) // 3))
_PSI_CY = fq2_inv(fq2_pow((_int(1), _int(1)), (Q - 1) // 2))


def g2_psi(p_aff):
    """Twist endomorphism on an affine point; eigenvalue BLS_X on G2."""
    if p_aff is None:
        return None
    x, y = p_aff
    return (fq2_mul(_PSI_CX, fq2_conj(x)), fq2_mul(_PSI_CY, fq2_conj(y)))


def _gls_split(k):
    """Signed digits d with k == sum(d[i] * BLS_X**i), each ~64 bits."""
    za = -BLS_X
    digits = []
    for _ in range(3):
        q, rem = divmod(k, za)
        if rem * 2 > za:
            q, rem = q + 1, rem - za
        digits.append(rem)
        k = -q
    digits.append(k)
    return digits


def _naf(k):
    """Non-adjacent form digits of k >= 0, least significant first."""
    out = []
    while k:
        if k & 1:
            d = 2 - (k & 3)
            k -= d
        else:
            d = 0
        out.append(d)
        k >>= 1
    return out


def _g2_gls_mul(p_aff, k):
    k = int(k) % int(R)
    if k == 0 or p_aff is None:
        return None
    bases = [p_aff]
    for _ in range(3):
        bases.append(g2_psi(bases[-1]))
    slots = []
    for d, p in zip(_gls_split(k), bases):
        if d < 0:
            d, p = -d, g2_neg(p)
        if d:
            slots.append((_naf(d), p, g2_neg(p)))
    top = max(len(naf) for naf, _, _ in slots)
    acc = None
    for j in range(top - 1, -1, -1):
        if acc is not None:
            acc = _g2_dbl(acc)
        for naf, plus, minus in slots:
            if j < len(naf) and naf[j]:
                acc = _g2_madd(acc, plus if naf[j] > 0 else minus)
    return _g2_to_affine(acc)


def g2_mul(p_aff, k, table=None):
    if table is not None:
        return _window_mul(p_aff, k, _g2_dbl, _g2_madd, _g2_to_affine, _g2_table, table)
    return _g2_gls_mul(p_aff, k)


def _multi_mul(points, scalars, dbl, madd, to_affine, table_fn, tables):
    """Simultaneous product of points[i]^scalars[i] (Straus interleaving)."""
    ks = [int(k) % int(R) for k in scalars]
    live = [(tables[i] if tables else table_fn(points[i]), ks[i])
            for i in range(len(points)) if points[i] is not None and ks[i] != 0]
    if not live:
        return None
    top = max(k.bit_length() for _, k in live)
    top = (top + _WINDOW - 1) // _WINDOW * _WINDOW - _WINDOW
    acc = None
    for shift in range(top, -1, -_WINDOW):
        if acc is not None:
            acc = dbl(dbl(dbl(dbl(acc))))
        for table, k in live:
            digit = (k >> shift) & 0xF
            if digit:
                acc = madd(acc, table[digit - 1])
    return to_affine(acc)


def g1_multi_mul(points, scalars, tables=None):
    return _multi_mul(points, scalars, _g1_dbl, _g1_madd, _g1_to_affine, _g1_table, tables)


def g2_multi_mul(points, scalars, tables=None):
    return _multi_mul(points, scalars, _g2_dbl, _g2_madd, _g2_to_affine, _g2_table, tables)


_FIXED_WINDOW = 6
_FIXED_MASK = (1 << _FIXED_WINDOW) - 1


def _powers_table(p_aff, dbl, add, batch_affine):
    """Chunked fixed-base table: rows[j][d-1] = (d << 6j) * P in affine."""
    one = FQ2_ONE if isinstance(p_aff[0], tuple) else _int(1)
    base = (p_aff[0], p_aff[1], one)
    n_chunks = -(-int(R).bit_length() // _FIXED_WINDOW)
    rows = []
    for j in range(n_chunks):
        row = [base]
        for _ in range(_FIXED_MASK - 1):
            row.append(add(row[-1], base))
        rows.append(batch_affine(row))
        if j + 1 < n_chunks:
            for _ in range(_FIXED_WINDOW):
                base = dbl(base)
    return rows


def g1_powers_table(p_aff):
    return _powers_table(p_aff, _g1_dbl, _g1_add, _g1_batch_affine)


def g2_powers_table(p_aff):
    return _powers_table(p_aff, _g2_dbl, _g2_add, _g2_batch_affine)


def _fixed_mul(rows, k, madd, to_affine):
    k = int(k) % int(R)
    acc = None
    j = 0
    while k:
        digit = k & _FIXED_MASK
        if digit:
            acc = madd(acc, rows[j][digit - 1])
        k >>= _FIXED_WINDOW
        j += 1
    return to_affine(acc)


def g1_fixed_mul(rows, k):
    return _fixed_mul(rows, k, _g1_madd, _g1_to_affine)


def g2_fixed_mul(rows, k):
    return _fixed_mul(rows, k, _g2_madd, _g2_to_affine)


def g1_in_subgroup(p):
    return g1_on_curve(p) and g1_mul(p, int(R) - 1) == g1_neg(p)


def g2_in_subgroup(p):
    # Candidate points are not yet known to lie in the r-torsion, so the
    # GLS shortcut does not apply here; use the plain window loop.
    return g2_on_curve(p) and _window_mul(
        p, int(R) - 1, _g2_dbl, _g2_madd, _g2_to_affine, _g2_table) == g2_neg(p)
