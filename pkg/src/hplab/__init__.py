"""Hermite-Pade polynomials for semiclassical functions: exact solvers,
Laguerre-type differential equations, zero asymptotics and potentials."""

__version__ = "0.1.0"
