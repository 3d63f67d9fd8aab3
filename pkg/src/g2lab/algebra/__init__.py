from .fields import (
    ExtensionField,
    FieldTooLarge,
    PrimeField,
    find_irreducible,
    frobenius_power,
    is_irreducible_mod_p,
    make_field,
)
from .linalg import char_poly, is_diagonalizable, kernel
from .numtheory import NotInSubgroup, dlog_mu_l, legendre, mult_order, poly_roots_mod_l
from .poly import PolyRing

__all__ = [
    "ExtensionField",
    "FieldTooLarge",
    "PrimeField",
    "PolyRing",
    "NotInSubgroup",
    "char_poly",
    "dlog_mu_l",
    "find_irreducible",
    "frobenius_power",
    "is_diagonalizable",
    "is_irreducible_mod_p",
    "kernel",
    "legendre",
    "make_field",
    "mult_order",
    "poly_roots_mod_l",
]
