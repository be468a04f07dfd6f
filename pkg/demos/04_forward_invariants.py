"""The forward map: reduced 1-D coefficients and their 2-D cross-checks.

For each primitive dual direction delta the pair (F_k, G_k) packages what
the operator's spectrum knows about the field and potential along delta.
Two independent routes compute them:

  * 1-D quadrature of the reduced integrands (fast, the production path);
  * 2-D quadrature of the full torus integrals I_full / J_full_Vpart,
    divided by the cell area (slow, kept as a cross-check).

Run as: python demos/04_forward_invariants.py
"""

import numpy as np

from magtorus import (
    DirectionalProfile,
    F_coeff,
    I_full,
    J_full_Vpart,
    Lattice,
    PrimitiveDirection,
    b0_for_unit_flux,
    build_potential,
    compute_invariant_set,
    random_admissible_field,
    random_mean_zero_field,
    tail_magnitude,
)

lat = Lattice((1.0, 0.0), (0.3, 1.1))

print("== invariants of a random admissible pair ==")
B = random_admissible_field(21, lat, 3, 0.3)
V = random_mean_zero_field(22, lat, 3)
inv = compute_invariant_set(B, V, max_primitive_norm=2, K=24)
print(f"flux integer l = {inv.l}, {len(inv.directions)} directions, K = {inv.K}")
print("direction   |F_1|        |G_1|        tail max|F_k|, k > K/2")
for d in inv.directions:
    print(f"{str(d):>9}   {abs(inv.F[d][0]):.6e} {abs(inv.G[d][0]):.6e} "
          f"{tail_magnitude(inv.F[d]):.6e}")

print()
print("== cross-check against the 2-D quadratures ==")
pot = build_potential(B)
print("d = k*(m0,n0)   Area*F_k vs I_full(d)   difference")
for (m0, n0) in ((0, 1), (1, 1), (-1, 2)):
    dh = PrimitiveDirection.canonical(n0, -m0)
    for k in (1, 2):
        Fk, Gk = inv.F[dh][k - 1], inv.G[dh][k - 1]
        if dh.flipped:
            Fk, Gk = np.conj(Fk), np.conj(Gk)
        dI = abs(I_full((k * m0, k * n0), pot, lat) - inv.c * Fk)
        dJ = abs(J_full_Vpart((k * m0, k * n0), V, pot, lat) - inv.c * Gk)
        print(f"  {k}*({m0:+d},{n0:+d})     F: {dI:.3e}            G: {dJ:.3e}")

print()
print("== sinusoidal profile: Bessel closed form ==")
# A1_delta(s)/b0 = alpha sin(2 pi s) gives F_k = (-1)^k J_k(2 pi k alpha)
from math import factorial

b0 = b0_for_unit_flux(lat)
alpha = 0.05
c1 = alpha * b0 / 2j
prof = DirectionalProfile({1: c1, -1: np.conj(c1)})


def J(k, x):
    # short ascending series, plenty for |x| of order 1
    return sum((-1) ** m / (factorial(m) * factorial(m + k)) * (x / 2) ** (2 * m + k)
               for m in range(24))


print(" k   F_k (1-D quadrature)    (-1)^k J_k(2 pi k alpha)")
for k in (1, 2, 3, 4):
    got = F_coeff(prof, b0, 1, k, 2048)
    want = (-1) ** k * J(k, 2 * np.pi * k * alpha)
    print(f"{k:2d}   {got.real:+.12f}       {want:+.12f}")
