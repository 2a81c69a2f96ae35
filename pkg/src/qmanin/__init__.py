"""qmanin: exact symbolic toolkit for q-Manin matrices.

Verifies q-determinant calculus, inverse/minor theorems, Cayley-Hamilton and
Newton identities, and the R-matrix/Lax-operator machinery by exact reduction
in finitely presented noncommutative algebras, with concrete operator
witnesses for the non-identities.
"""

from .scalars import LaurentQ, RatQ, RatZW, Rational, scalar_arith, shift_z, substitute_q

__all__ = [
    "LaurentQ",
    "RatQ",
    "RatZW",
    "Rational",
    "scalar_arith",
    "shift_z",
    "substitute_q",
]

__version__ = "0.1.0"
