"""Finite model search for first-order theories.

Clauses are flattened to relational form, grounded over {0..n-1} and
handed to a DPLL procedure; propositional models are read back as
function and relation tables.
"""

__version__ = "0.1.0"
