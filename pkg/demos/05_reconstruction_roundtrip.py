"""Reconstruction: recover B and V from the invariants, then sweep K.

The inverse route, direction by direction: synthesize the density s'(y)
from {F_k}, invert the monotone map y(s) (safeguarded Newton), read off
the field profile from the map and the potential profile from {G_k},
then assemble the 2-D Fourier expansions across directions.

Run as: python demos/05_reconstruction_roundtrip.py
"""

import time

import numpy as np

from magtorus import (
    FourierField2D,
    Lattice,
    MonotonicityError,
    b0_for_unit_flux,
    coefficient_errors,
    compute_invariant_set,
    format_report,
    invert_invariants,
    random_admissible_field,
    random_mean_zero_field,
    roundtrip,
    truncate_invariants,
)

lat = Lattice((1.0, 0.0), (0.3, 1.1))

print("== headline round trip ==")
B = random_admissible_field(31, lat, 3, 0.25)
V = random_mean_zero_field(32, lat, 3)
t0 = time.time()
report = roundtrip(B, V, max_primitive_norm=3, K=48, M=256)
print(f"({time.time() - t0:.2f}s)")
print(format_report(report))

print()
print("== reconstruction error vs harmonic cutoff ==")
inv = compute_invariant_set(B, V, 3, 48)
print("  K   B rel Linf    V rel Linf")
for K in (4, 8, 16, 32, 48):
    B_rec, V_rec, _ = invert_invariants(truncate_invariants(inv, K), 256)
    bl, _ = coefficient_errors(B, B_rec)
    vl, _ = coefficient_errors(V, V_rec)
    print(f"{K:3d}   {bl:.3e}     {vl:.3e}")
print("the truncation tail dominates until it hits the quadrature floor")

print()
print("== the monotonicity threshold ==")
# one-harmonic fields B = b0 + 2c cos(2 pi delta . x) make the standing
# hypothesis sharp: the map s -> y(s) folds exactly when 2c >= |b0|
b0 = b0_for_unit_flux(lat)
V0 = FourierField2D(lat, 0.0, {})
for frac in (0.5, 0.9):
    c = frac * abs(b0) / 2
    B1 = FourierField2D(lat, b0, {(1, 0): c, (-1, 0): c})
    inv1 = compute_invariant_set(B1, V0, 1, 64)
    B1_rec, _, maps = invert_invariants(inv1, 512)
    err = coefficient_errors(B1, B1_rec)[0]
    mins = min(m.sprime_of_y.min() for m in maps.values())
    print(f"  2c = {frac:3.1f}|b0|: min s' = {mins:.4f}, B error {err:.2e}")

# past the threshold the forward data still exists, but no monotone map
# can generate it; synthesis reports the failure rather than guessing
from magtorus import DirectionalProfile, F_coeff, profile_antiderivative, synthesize_sprime

c_bad = 0.525 * abs(b0)
prof = profile_antiderivative(DirectionalProfile({1: c_bad, -1: c_bad}))
F = np.array([F_coeff(prof, b0, 1, k, 8192) for k in range(1, 65)])
try:
    synthesize_sprime(F, 512)
except MonotonicityError as err:
    print(f"  2c = 1.05|b0|: {err}")

print()
print("the same pipeline, with files and plots: see the command line tool")
print("  magtorus roundtrip -c experiment.cfg --out results/")
