#!/usr/bin/env python3
"""Symbolic derivation of the manufactured data used by the convergence studies.

Prints div(u), curl(u), curl^2(u), curl^3(u) and f = curl^4(u) for the degree-6
exact solution. The expanded polynomials are hard-coded in src/driver.cpp;
rerun this script after changing the exact solution.
"""
import sympy as sp

x, y, z = sp.symbols("x y z")


def curl(v):
    return sp.Matrix([
        sp.diff(v[2], y) - sp.diff(v[1], z),
        sp.diff(v[0], z) - sp.diff(v[2], x),
        sp.diff(v[1], x) - sp.diff(v[0], y),
    ])


u = sp.Matrix([-2 * x**2 * y**2 * z, 2 * x**2 * y**3 * z, -x * y**2 * z**2 * (3 * x - 2)])

print("div u   =", sp.expand(sp.diff(u[0], x) + sp.diff(u[1], y) + sp.diff(u[2], z)))
w = u
for n in range(1, 5):
    w = curl(w)
    print(f"curl^{n} u =", [sp.expand(c) for c in w])
print("deg f   =", max(sp.Poly(c, x, y, z).total_degree() for c in w if c != 0))
