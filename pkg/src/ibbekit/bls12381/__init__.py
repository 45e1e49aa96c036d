"""Self-contained BLS12-381 backend: tower fields, G1/G2, optimal ate pairing.

Only :mod:`ibbekit.pairing_core` should import from here; everything above
that layer is curve-agnostic.
"""

from .fields import Q, R, BLS_X, FQ12_ONE
from .curve import (
    G1_GEN,
    G2_GEN,
    g1_add_affine,
    g1_neg,
    g1_mul,
    g1_multi_mul,
    g1_powers_table,
    g1_fixed_mul,
    g1_on_curve,
    g1_in_subgroup,
    _g1_table,
    g2_add_affine,
    g2_neg,
    g2_mul,
    g2_psi,
    g2_multi_mul,
    g2_powers_table,
    g2_fixed_mul,
    g2_on_curve,
    g2_in_subgroup,
    _g2_table,
)
from .pairing import (
    ate_pairing,
    gt_exp,
    gt_powers_table,
    gt_fixed_exp,
    gt_in_subgroup,
)
from .fields import fq12_mul, fq12_conj

__all__ = [
    "Q", "R", "BLS_X", "FQ12_ONE",
    "G1_GEN", "G2_GEN",
    "g1_add_affine", "g1_neg", "g1_mul", "g1_multi_mul", "g1_powers_table",
    "g1_fixed_mul", "g1_on_curve", "g1_in_subgroup",
    "g2_add_affine", "g2_neg", "g2_mul", "g2_psi", "g2_multi_mul", "g2_powers_table",
    "g2_fixed_mul", "g2_on_curve", "g2_in_subgroup",
    "ate_pairing", "gt_exp", "gt_powers_table", "gt_fixed_exp", "gt_in_subgroup",
    "fq12_mul", "fq12_conj",
]
