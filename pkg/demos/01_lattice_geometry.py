"""Lattice geometry tour: dual bases, flux quantization, genericity.

Run as: python demos/01_lattice_geometry.py
"""

import numpy as np

from magtorus import (
    Lattice,
    b0_for_unit_flux,
    complete_basis,
    enumerate_primitive_directions,
    flux_integer,
    is_generic,
    perp_primitive,
    unit_flux_sublattice,
)

print("== periods and dual periods ==")
lat = Lattice((1.0, 0.0), (0.3, 1.1))
E = lat.basis_matrix()
D = lat.dual_matrix()
print(f"e1 = {lat.e1}, e2 = {lat.e2}, cell area = {lat.area}")
print("pairing e_i* . e_j (should be the identity):")
print(D @ E.T)

print()
print("== flux quantization ==")
# a constant field b0 is compatible with magnetic translations only when
# b0 * area is an integer multiple of 2 pi
b0 = b0_for_unit_flux(lat)
print(f"unit-flux field strength: b0 = {b0:.6f}")
for mult in (1.0, 2.0, 0.5, np.sqrt(2)):
    l = flux_integer(lat, mult * b0)
    tag = "non-quantized" if l is None else f"l = {l}"
    print(f"  b0 * {mult:<8.4f} -> {tag}")

print()
print("== half flux and the sublattice fix ==")
sub = unit_flux_sublattice(lat, 2)
print(f"doubling e1 gives {sub.e1}, {sub.e2}: "
      f"flux integer there is {flux_integer(sub, 0.5 * b0)}")

print()
print("== genericity of the length spectrum ==")
for name, cand in (("skew", lat), ("square", Lattice((1.0, 0.0), (0.0, 1.0)))):
    for radius in (3.0, 5.0):
        ok, witness = is_generic(cand, radius)
        if ok:
            print(f"  {name} lattice, radius {radius}: all dual lengths distinct")
        else:
            print(f"  {name} lattice, radius {radius}: collision between "
                  f"{witness[0]} and {witness[1]}")

print()
print("== primitive directions and adapted bases ==")
dirs = enumerate_primitive_directions(2)
print(f"{len(dirs)} primitive directions with sup-norm <= 2 (up to sign):")
print(" ", " ".join(str(d) for d in dirs))
dp = perp_primitive(2, 1)
print(f"dual direction orthogonal to d = 2 e1 + 1 e2: {dp}"
      f" (flipped into canonical form: {dp.flipped})")
d = dirs[-1]
dprime, gamma, gamma_prime = complete_basis(d)
print(f"completing {d} to a unimodular dual basis: delta' = {dprime}; "
      f"paired lattice vectors gamma = {gamma}, gamma' = {gamma_prime}")
