"""Desk-scale laboratory for multiplicative functions and multiplicative actions.

Subpackages cover the arithmetic substrate (sieves, factorization, Dirichlet
characters), completely multiplicative functions and the pretentious distance,
highly divisible index sets, linear-form algebra, quadratic-equation
parametrizations, simulated measure-preserving actions, ergodic-average
engines, and Gowers-type uniformity norms.  The ``multact-lab`` CLI binds the
pieces into named, reproducible experiments.
"""

__version__ = "0.1.0"

from ._backend import backend_name

__all__ = ["__version__", "backend_name"]
