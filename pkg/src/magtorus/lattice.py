"""Lattice geometry for a flat 2-D torus.

A rank-2 lattice L = {a*e1 + b*e2 : a, b integers} fixes the torus R^2/L.
Fourier modes e^{2 pi i beta.x} live on the dual lattice
L* = {beta : beta.d in Z for all d in L}; the dual basis satisfies
ei_star . ej = delta_ij with no factor of 2 pi folded in.

This module owns the integer side of the problem: dual bases, primitive
(coprime) dual directions and their completion to unimodular bases,
genericity of the length spectrum, flux quantization arithmetic, and the
sublattice trick that restores unit flux when the flux integer is 1/q.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

__all__ = [
    "Lattice",
    "PrimitiveDirection",
    "dual_basis",
    "flux_integer",
    "b0_for_unit_flux",
    "is_generic",
    "primitive_decompose",
    "perp_primitive",
    "complete_basis",
    "enumerate_primitive_directions",
    "unit_flux_sublattice",
    "save_lattice",
    "load_lattice",
    "format_lattice_block",
    "parse_lattice_block",
]

# Continued-fraction rational detection for the flux integer: physical
# inputs are exact small rationals, so a denominator cap avoids false
# positives on irrational b0 * area / (2 pi).
FLUX_DENOMINATOR_CAP = 64
FLUX_TOLERANCE = 1e-9


def dual_basis(e1, e2):
    """Dual basis (e1s, e2s) with ei_star . ej = delta_ij.

    Closed form for 2x2: e1s = (e2y, -e2x)/det, e2s = (-e1y, e1x)/det.
    Raises ValueError when the basis is degenerate
    (|det| <= 1e-12 * |e1| * |e2|).
    """
    e1x, e1y = float(e1[0]), float(e1[1])
    e2x, e2y = float(e2[0]), float(e2[1])
    det = e1x * e2y - e1y * e2x
    scale = math.hypot(e1x, e1y) * math.hypot(e2x, e2y)
    if abs(det) <= 1e-12 * scale or scale == 0.0:
        raise ValueError(f"degenerate lattice basis: det = {det!r}")
    e1s = (e2y / det, -e2x / det)
    e2s = (-e1y / det, e1x / det)
    return e1s, e2s


@dataclass(frozen=True)
class Lattice:
    """Rank-2 lattice with basis {e1, e2} and cached derived geometry.

    Derived fields: dual basis (e1s, e2s), area = |det(e1, e2)| and
    orientation = sign of det(e1, e2). Immutable value type.
    """

    e1: tuple[float, float]
    e2: tuple[float, float]
    e1s: tuple[float, float] = field(init=False, compare=False)
    e2s: tuple[float, float] = field(init=False, compare=False)
    area: float = field(init=False, compare=False)
    orientation: int = field(init=False, compare=False)

    def __post_init__(self):
        e1 = (float(self.e1[0]), float(self.e1[1]))
        e2 = (float(self.e2[0]), float(self.e2[1]))
        e1s, e2s = dual_basis(e1, e2)  # validates non-degeneracy
        det = e1[0] * e2[1] - e1[1] * e2[0]
        object.__setattr__(self, "e1", e1)
        object.__setattr__(self, "e2", e2)
        object.__setattr__(self, "e1s", e1s)
        object.__setattr__(self, "e2s", e2s)
        object.__setattr__(self, "area", abs(det))
        object.__setattr__(self, "orientation", 1 if det > 0 else -1)

    @property
    def det(self) -> float:
        """Signed determinant det(e1, e2) = orientation * area."""
        return self.orientation * self.area

    def basis_matrix(self) -> np.ndarray:
        """Rows e1, e2 (shape (2, 2))."""
        return np.array([self.e1, self.e2], dtype=float)

    def dual_matrix(self) -> np.ndarray:
        """Rows e1s, e2s (shape (2, 2))."""
        return np.array([self.e1s, self.e2s], dtype=float)

    def lattice_vector(self, a, b) -> np.ndarray:
        """Cartesian a*e1 + b*e2."""
        return a * np.asarray(self.e1) + b * np.asarray(self.e2)

    def dual_vector(self, m, n) -> np.ndarray:
        """Cartesian m*e1s + n*e2s."""
        return m * np.asarray(self.e1s) + n * np.asarray(self.e2s)

    def point(self, s, u) -> np.ndarray:
        """Cartesian points s*e1 + u*e2; s, u broadcastable arrays.

        Returns shape broadcast(s, u).shape + (2,).
        """
        s = np.asarray(s, dtype=float)
        u = np.asarray(u, dtype=float)
        return np.stack(
            [s * self.e1[0] + u * self.e2[0], s * self.e1[1] + u * self.e2[1]],
            axis=-1,
        )


def flux_integer(lattice: Lattice, b0: float) -> Optional[Fraction]:
    """Flux quantization check: l = b0 * det(e1, e2) / (2 pi).

    Returns the exact rational l when the computed value lies within
    1e-9 of a rational with denominator <= 64, else None (non-quantized).
    sign(l) = sign(b0) * orientation. b0 = 0 is rejected: the whole
    construction assumes nonzero mean field.
    """
    if b0 == 0:
        raise ValueError("b0 must be nonzero (the mean magnetic field sets the flux)")
    l_real = b0 * lattice.det / (2.0 * math.pi)
    cand = Fraction(l_real).limit_denominator(FLUX_DENOMINATOR_CAP)
    if abs(float(cand) - l_real) <= FLUX_TOLERANCE:
        return cand
    return None


def b0_for_unit_flux(lattice: Lattice, sign: int = 1) -> float:
    """The mean field with |flux integer| = 1: |b0| = 2 pi / area.

    sign is the sign of b0 (the observable the construction treats as
    known input).
    """
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign!r}")
    return sign * 2.0 * math.pi / lattice.area


def _integer_bound(lattice: Lattice, radius: float) -> tuple[int, int]:
    # coefficient a of d = a*e1 + b*e2 is d . e1s, so |a| <= radius*|e1s|
    amax = int(math.floor(radius * math.hypot(*lattice.e1s))) + 1
    bmax = int(math.floor(radius * math.hypot(*lattice.e2s))) + 1
    return amax, bmax


def is_generic(lattice: Lattice, radius: float):
    """Distinct-lengths test for the lattice, up to |d| <= radius.

    Returns (True, None) when every pair of lattice vectors of equal
    length (relative tolerance 1e-10 on squared lengths) is a +- pair,
    else (False, ((a, b), (a2, b2))) with an offending pair in integer
    coordinates.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    amax, bmax = _integer_bound(lattice, radius)
    r2 = radius * radius
    entries = []
    for a in range(-amax, amax + 1):
        for b in range(-bmax, bmax + 1):
            if a == 0 and b == 0:
                continue
            v = lattice.lattice_vector(a, b)
            q = float(v @ v)
            if q <= r2 * (1.0 + 1e-12):
                entries.append((q, (a, b)))
    entries.sort(key=lambda t: t[0])
    for i in range(len(entries)):
        qi, di = entries[i]
        j = i + 1
        while j < len(entries) and entries[j][0] - qi <= 1e-10 * entries[j][0]:
            dj = entries[j][1]
            if dj != di and dj != (-di[0], -di[1]):
                return False, (di, dj)
            j += 1
    return True, None


def primitive_decompose(m: int, n: int) -> tuple[int, int, int]:
    """(m, n) = k * (m0, n0) with k = gcd(|m|, |n|) > 0 and gcd(|m0|, |n0|) = 1."""
    if m == 0 and n == 0:
        raise ValueError("cannot decompose the zero index")
    k = math.gcd(abs(m), abs(n))
    return k, m // k, n // k


@dataclass(frozen=True)
class PrimitiveDirection:
    """Dual direction delta = a*e1s + b*e2s with gcd(|a|, |b|) = 1.

    Canonical representatives satisfy b > 0, or (b = 0 and a > 0): one
    representative per line through the origin. The flipped flag records
    whether canonicalization negated the input; it does not take part in
    equality or ordering.
    """

    a: int
    b: int
    flipped: bool = field(default=False, compare=False)

    def __post_init__(self):
        if math.gcd(abs(self.a), abs(self.b)) != 1:
            raise ValueError(f"({self.a}, {self.b}) is not primitive")

    @property
    def is_canonical(self) -> bool:
        return self.b > 0 or (self.b == 0 and self.a > 0)

    @staticmethod
    def canonical(a: int, b: int) -> "PrimitiveDirection":
        """Canonical representative of the line through (a, b)."""
        if b < 0 or (b == 0 and a < 0):
            return PrimitiveDirection(-a, -b, flipped=True)
        return PrimitiveDirection(a, b)

    def negated(self) -> "PrimitiveDirection":
        return PrimitiveDirection(-self.a, -self.b, flipped=not self.flipped)

    def cartesian(self, lattice: Lattice) -> np.ndarray:
        return lattice.dual_vector(self.a, self.b)

    def __str__(self):
        return f"({self.a},{self.b})"


def perp_primitive(m0: int, n0: int) -> PrimitiveDirection:
    """Primitive dual direction orthogonal to d = m0*e1 + n0*e2.

    Raw coordinates are (-n0, m0), so that delta . d = -n0*m0 + m0*n0 = 0
    exactly; the result is canonicalized with the flip recorded.
    """
    if math.gcd(abs(m0), abs(n0)) != 1:
        raise ValueError(f"({m0}, {n0}) is not primitive")
    return PrimitiveDirection.canonical(-n0, m0)


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    # returns (g, x, y) with x*a + y*b = g = gcd(a, b), g >= 0
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b != 0:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def complete_basis(delta: PrimitiveDirection):
    """Complete delta to a unimodular dual basis and return the L-side dual.

    Returns (delta_prime, gamma, gamma_prime): integer coordinate pairs
    with det([delta; delta_prime]) = +1 and the pairing
    delta.gamma = 1, delta.gamma_prime = 0, delta_prime.gamma = 0,
    delta_prime.gamma_prime = 1 (gamma, gamma_prime are lattice vectors
    in e1, e2 coordinates). Exact integer arithmetic throughout.
    """
    a, b = delta.a, delta.b
    g, x, y = _xgcd(a, b)
    assert g == 1  # guaranteed by PrimitiveDirection
    delta_prime = (-y, x)
    # the 2x2 matrix [[a, b], [-y, x]] has det a*x + b*y = 1; its inverse
    # columns give the dual pair in e1, e2 coordinates
    gamma = (x, y)
    gamma_prime = (-b, a)
    return delta_prime, gamma, gamma_prime


def enumerate_primitive_directions(max_sup_norm: int) -> list[PrimitiveDirection]:
    """All canonical primitive directions with max(|a|, |b|) <= max_sup_norm.

    Sorted lexicographically by (a, b); every nonzero dual index in the
    box is p * delta for exactly one listed delta and one nonzero p.
    """
    if max_sup_norm < 1:
        raise ValueError("max_sup_norm must be >= 1")
    out = []
    for b in range(0, max_sup_norm + 1):
        astart = 1 if b == 0 else -max_sup_norm
        for a in range(astart, max_sup_norm + 1):
            if math.gcd(abs(a), abs(b)) == 1:
                out.append(PrimitiveDirection(a, b))
    out.sort(key=lambda d: (d.a, d.b))
    return out


def unit_flux_sublattice(lattice: Lattice, q: int) -> Lattice:
    """The sublattice L0 with basis {q*e1, e2}.

    Area(L0) = q * Area(L); a field with flux integer 1/q over L has flux
    integer 1 over L0, and every L-periodic field is L0-periodic (the
    L-coefficient at (m, n) becomes the L0-coefficient at (q*m, n)).
    """
    if q < 1 or int(q) != q:
        raise ValueError("q must be a positive integer")
    e1 = (q * lattice.e1[0], q * lattice.e1[1])
    return Lattice(e1, lattice.e2)


# ---------------------------------------------------------------------------
# serialization: plain text, full-precision decimal (repr round-trips floats
# exactly, which keeps save/load bit-stable)

_VEC_LINE = re.compile(r"^\s*(\w+)\s*=\s*\[\s*([^,\]]+)\s*,\s*([^,\]]+)\s*\]\s*$")


def format_lattice_block(lattice: Lattice) -> str:
    return (
        f"e1 = [{float(lattice.e1[0])!r}, {float(lattice.e1[1])!r}]\n"
        f"e2 = [{float(lattice.e2[0])!r}, {float(lattice.e2[1])!r}]\n"
    )


def parse_lattice_block(lines) -> Lattice:
    """Parse 'e1 = [x, y]' / 'e2 = [x, y]' lines (order-insensitive)."""
    vecs = {}
    for line in lines:
        m = _VEC_LINE.match(line)
        if m and m.group(1) in ("e1", "e2"):
            vecs[m.group(1)] = (float(m.group(2)), float(m.group(3)))
    if "e1" not in vecs or "e2" not in vecs:
        raise ValueError("lattice block must define both e1 and e2 as [x, y]")
    return Lattice(vecs["e1"], vecs["e2"])


def save_lattice(lattice: Lattice, path) -> None:
    with open(path, "w") as fh:
        fh.write("# torus lattice\n")
        fh.write(format_lattice_block(lattice))


def load_lattice(path) -> Lattice:
    with open(path) as fh:
        return parse_lattice_block(fh.readlines())
