"""Exact computations around congruence numbers of weight-2 newforms.

Modular symbols and Hecke algebras, Brandt modules of definite quaternion
algebras, Tamagawa exponents and Gross-point theta elements, plus checks
of the exponent identities that tie them together.
"""

__version__ = "0.1.0"
