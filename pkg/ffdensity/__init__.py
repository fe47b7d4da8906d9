"""Densities of subsets of holomorphy rings of F_q(x)

Exact Euler-product and zeta closed forms for the density of nicely totally
ramified polynomials and of rectangular unimodular matrices, and an empirical
harness that counts over Riemann-Roch boxes.
"""

__version__ = "0.1.0"
