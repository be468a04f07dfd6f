"""Fields on the torus: synthesis, the standing hypothesis, projections.

Run as: python demos/02_fields_and_potential.py
"""

import numpy as np

from magtorus import (
    Lattice,
    PrimitiveDirection,
    build_potential,
    complete_basis,
    eval_A,
    eval_field,
    eval_profile_real,
    hypothesis_margin,
    line_average,
    project_direction,
    random_admissible_field,
)

lat = Lattice((1.0, 0.0), (0.3, 1.1))

print("== a random admissible field ==")
B = random_admissible_field(seed=7, lattice=lat, max_index=3, target_margin=0.3)
print(f"B has mean {B.mean:.6f} and {len(B.coeffs)} oscillating coefficients")
margin = hypothesis_margin(B)
print(f"hypothesis margin |b0| - max|B - b0| = {margin:.6f} "
      f"({margin / abs(B.mean):.1%} of |b0|)")

print()
print("== the magnetic potential ==")
pot = build_potential(B)
# spot check: d2 A1 - d1 A2 = B at a few points, via small central
# differences on the evaluated potential
h = 1e-5
rng = np.random.default_rng(0)
worst = 0.0
for x in rng.uniform(-1, 1, (5, 2)):
    dA1 = (eval_A(pot, x + (0, h))[0] - eval_A(pot, x - (0, h))[0]) / (2 * h)
    dA2 = (eval_A(pot, x + (h, 0))[1] - eval_A(pot, x - (h, 0))[1]) / (2 * h)
    worst = max(worst, abs((dA1 - dA2) - eval_field(B, x).real))
print(f"max |curl A - B| over 5 random points (h = {h:g}): {worst:.3e}")

print()
print("== directional projections are line averages ==")
# b0 + B_delta(s) averages B over the line delta . x = s; the projection
# keeps exactly the Fourier coefficients at multiples of delta
delta = PrimitiveDirection(1, 1)
prof = project_direction(B, delta)
print(f"profile along {delta}: harmonics {sorted(prof.coeffs)}")
_, gamma, gamma_prime = complete_basis(delta)
for s in (0.0, 0.37):
    x = s * lat.lattice_vector(*gamma)      # a point with delta . x = s
    direct = line_average(B, x, gamma_prime)
    reduced = B.mean + eval_profile_real(prof, s)
    print(f"  s = {s:4.2f}: profile {reduced:+.8f}, line average {direct:+.8f}")

print()
print("== the margin is sharp for one-harmonic fields ==")
from magtorus import FourierField2D, b0_for_unit_flux

b0 = b0_for_unit_flux(lat)
for frac in (0.5, 0.9, 1.1):
    c = frac * abs(b0) / 2
    B1 = FourierField2D(lat, b0, {(1, 0): c, (-1, 0): c})
    print(f"  2c = {frac:4.2f} |b0|: margin = {hypothesis_margin(B1):+.6f}")
