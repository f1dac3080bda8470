"""Exact computations around the Iwahori–Whittaker function of the twisted Steinberg
representation of GL_n over F_p((π)), its Hecke eigenvalues, and nilpotent
cyclic-quiver representations (parabolic torsion sheaves at one point)."""

__version__ = "0.1.0"
