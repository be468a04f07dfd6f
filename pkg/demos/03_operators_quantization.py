"""Magnetic translations, flux quantization, and parallel transport.

The operator side of the story: which translation phases commute with
the Hamiltonian, when the two translations commute with each other, and
what the transport amplitude a0 looks like.

Run as: python demos/03_operators_quantization.py
"""

import numpy as np

from magtorus import (
    FourierField2D,
    H_commutation_residual,
    Lattice,
    b0_for_unit_flux,
    build_potential,
    commutator_phase,
    flux_integer,
    random_admissible_field,
    random_mean_zero_field,
    transport_residual,
)
from magtorus.operators import a0

lat = Lattice((1.0, 0.0), (0.3, 1.1))
b0 = b0_for_unit_flux(lat)

print("== when do the two magnetic translations commute? ==")
print("|phase|  flux")
for mult in (1.0, 2.0, 3.0, 0.5, 1.5):
    phase = commutator_phase(lat, mult * b0)
    l = flux_integer(lat, mult * b0)
    print(f"{abs(phase):7.4f}  l = {l}")
print("integer flux: commuting translations; l = 1/2: maximal obstruction")

print()
print("== the Hamiltonian commutes with the right translation phases ==")
B = random_admissible_field(2, lat, 2, 0.4)
V = random_mean_zero_field(3, lat, 2)
pot = build_potential(B)


def probe(x):
    x = np.asarray(x, dtype=float)
    w = (x[..., 0] - 0.4) ** 2 + (x[..., 1] - 0.5) ** 2
    return np.exp(-3.0 * w + 1j * x[..., 0])


print("residual of [H, T_1] u on a smooth probe (4th-order stencil):")
for h in (1.0 / 64, 1.0 / 128, 1.0 / 256):
    r = H_commutation_residual(probe, pot, V, 1, h)
    print(f"  h = 1/{round(1 / h):<4d} residual = {r:.3e}")
e1 = np.asarray(lat.e1)
v_bad = -0.5 * pot.b0 * np.array([e1[1], -e1[0]]) + np.array([0.1, 0.0])
r_bad = H_commutation_residual(probe, pot, V, 1, 1.0 / 256, v_override=v_bad)
print(f"same, with the translation phase perturbed: {r_bad:.3e} (no decay)")

print()
print("== the transport amplitude is a pure phase ==")
rng = np.random.default_rng(1)
worst = 0.0
for _ in range(50):
    x, y = rng.uniform(-1.5, 1.5, (2, 2))
    worst = max(worst, abs(abs(a0(x, y, pot)) - 1.0))
print(f"max | |a0(x,y)| - 1 | over 50 random pairs: {worst:.3e}")
y = np.array([0.37, -0.21])
print(f"a0(y, y) = {a0(y, y, pot)}   (diagonal is exactly 1)")

print()
print("== a0 solves the transport equation along the segment ==")
x, y = np.array([0.8, -0.3]), np.array([-0.2, 0.4])
for h in (1e-4, 5e-5, 2.5e-5):
    print(f"  h = {h:.1e}: residual = {transport_residual(x, y, pot, h):.3e}")
print("(2nd-order decay: halving h divides the residual by about 4)")

print()
print("== constant field closed form ==")
pot0 = build_potential(FourierField2D(lat, b0, {}))
x = np.array([1.0, 0.0])
y = np.array([0.0, 1.0])
val = a0(x, y, pot0)
area_term = 0.5 * b0 * (x[0] * y[1] - x[1] * y[0])
print(f"a0(x, y) = {val:.6f}, exp(i b0 (x wedge y)/2) = "
      f"{np.exp(1j * area_term):.6f}")
