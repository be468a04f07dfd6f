"""Forward computation of the spectral invariants.

For a unit-flux field B (flux integer l = +-1) and potential V, each
primitive dual direction delta contributes two families of invariants:

    F_k(delta) = int_0^1 exp(-2 pi i k l y(s)) ds,
    G_k(delta) = int_0^1 V_delta(s) exp(-2 pi i k l y(s)) ds,

where y(s) = s + A1_delta(s)/b0 is the monotone change of variable built
from the directional antiderivative of B_delta. F_k is the k-th Fourier
coefficient of the pushforward density s'(y); G_k is the k-th coefficient
of V_delta(s(y)) s'(y). Trapezoid quadrature on a uniform grid is
spectrally accurate here because every integrand is a smooth 1-periodic
function.

I_full and J_full_Vpart evaluate the corresponding 2-D torus integrals
directly (with the line integral of A1 in closed form) and serve as
independent cross-checks of the 1-D reduction:

    I_full(k d0) = Area * F_k(delta_hat),  delta_hat = n0 e1s - m0 e2s,

for d0 = m0 e1 + n0 e2 primitive, and likewise for J and G.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .fields import (
    DirectionalProfile,
    FourierField2D,
    MagneticPotential,
    eval_profile_real,
    hypothesis_margin,
    profile_antiderivative,
    project_direction,
)
from .lattice import (
    Lattice,
    PrimitiveDirection,
    enumerate_primitive_directions,
    flux_integer,
    format_lattice_block,
    parse_lattice_block,
)

__all__ = [
    "InvariantSet",
    "HypothesisError",
    "y_map",
    "F_coeff",
    "G_coeff",
    "pushforward_functional",
    "I_full",
    "J_full_Vpart",
    "compute_invariant_set",
    "default_quadrature_points",
    "truncate_invariants",
    "tail_magnitude",
    "save_invariants",
    "load_invariants",
]

TWO_PI_I = 2j * math.pi


class HypothesisError(ValueError):
    """The mean field does not dominate the oscillation (margin <= 0)."""

    def __init__(self, margin: float):
        super().__init__(f"hypothesis margin must be positive, got {margin:.6g}")
        self.margin = margin


@dataclass(frozen=True, eq=False)
class InvariantSet:
    """The computed invariants for one field pair.

    F[delta] and G[delta] are complex arrays indexed k - 1 for
    k = 1..K; k = 0 is implicitly F = 1, G = 0 (means of the pushforward
    density and of V), and negative k follows by conjugation because the
    fields are real. c is the Jacobian factor of the 2-D reduction, equal
    to Area(D) for every direction.
    """

    lattice: Lattice
    b0: float
    l: int
    K: int
    N: int
    c: float
    directions: tuple
    F: dict
    G: dict


def y_map(A1delta: DirectionalProfile, b0: float, s):
    """y(s) = s + A1_delta(s)/b0; satisfies y(s + 1) = y(s) + 1."""
    s = np.asarray(s, dtype=float)
    if not A1delta.coeffs:
        return s if s.ndim else float(s)
    out = s + eval_profile_real(A1delta, s) / b0
    return out if out.ndim else float(out)


def _check_quadrature(N: int, osc: int, bandwidth: int):
    if N < 64:
        raise ValueError(f"N = {N} is below the floor of 64 quadrature points")
    need = 8 * (abs(osc) + bandwidth)
    if N < need:
        raise ValueError(f"N = {N} undersamples the integrand: need >= {need}")


def F_coeff(A1delta: DirectionalProfile, b0: float, l: int, k: int, N: int) -> complex:
    """Trapezoid value of int_0^1 exp(-2 pi i k l y(s)) ds, k != 0.

    For a mean-zero trig-polynomial profile the integrand is smooth and
    1-periodic, so the uniform N-point rule converges spectrally; N must
    oversample the fastest oscillation (N >= 8(|k l| + bandwidth)).
    """
    if k == 0:
        raise ValueError("k = 0 is the trivial coefficient (F_0 = 1); request k != 0")
    _check_quadrature(N, k * l, A1delta.bandwidth())
    s = np.arange(N) / N
    y = y_map(A1delta, b0, s)
    return complex(np.exp(-TWO_PI_I * k * l * y).mean())


def G_coeff(Vdelta: DirectionalProfile, A1delta: DirectionalProfile,
            b0: float, k: int, N: int) -> complex:
    """Trapezoid value of int_0^1 V_delta(s) exp(-2 pi i k y(s)) ds, k != 0."""
    if k == 0:
        raise ValueError("k = 0 gives the mean of V_delta, which is zero by construction")
    _check_quadrature(N, k, max(A1delta.bandwidth(), Vdelta.bandwidth()))
    s = np.arange(N) / N
    y = y_map(A1delta, b0, s)
    v = eval_profile_real(Vdelta, s) if Vdelta.coeffs else np.zeros(N)
    return complex((v * np.exp(-TWO_PI_I * k * y)).mean())


def pushforward_functional(f_coeffs: dict, A1delta: DirectionalProfile,
                           b0: float, l: int) -> complex:
    """int_0^1 f(y(s)) ds for f of period 1/l given by Fourier coefficients.

    f(y) = sum_m f_m e^{2 pi i m y} with every index m a multiple of l;
    each term reduces to an F coefficient, so the value is assembled
    termwise. Real-valued f (Hermitian coefficients) gives a real result
    up to round-off.
    """
    keys = [int(m) for m in f_coeffs]
    for m in keys:
        if m % l != 0:
            raise ValueError(f"coefficient index {m} is not a multiple of l = {l}")
    bw = A1delta.bandwidth()
    kmax = max((abs(m) for m in keys), default=0)
    N = max(256, 8 * (kmax + bw))
    total = complex(f_coeffs.get(0, 0.0))
    for m in keys:
        if m == 0:
            continue
        total += complex(f_coeffs[m]) * F_coeff(A1delta, b0, l, -m // l, N)
    return total


def _torus_grid(lattice: Lattice, N2: int):
    s = np.arange(N2) / N2
    return lattice.point(s[:, None], s[None, :])


def _oscillatory_phase(d, pot: MagneticPotential, lattice: Lattice, X: np.ndarray):
    """exp of i[b0 (d1 x2 - d2 x1) + int_0^1 d . A1(x + s d) ds] on the grid X.

    The A0 parts of the exponent, -A0(d).x + int d.A0(x + s d), combine to
    b0(d1 x2 - d2 x1); the A1 line integral keeps only beta.d = 0 modes
    (the rest integrate to zero exactly over the unit segment).
    """
    dm, dn = int(d[0]), int(d[1])
    dc = lattice.lattice_vector(dm, dn)
    phase = pot.b0 * (dc[0] * X[..., 1] - dc[1] * X[..., 0])
    line = np.zeros(X.shape[:-1], dtype=complex)
    for (m, n), c in pot.a1coeffs.items():
        if m * dm + n * dn == 0:
            beta = lattice.dual_vector(m, n)
            line += complex(dc @ c) * np.exp(TWO_PI_I * (X @ beta))
    assert np.max(np.abs(line.imag)) <= 1e-10 * max(1.0, float(np.max(np.abs(line)))), \
        "A1 line integral is not real"
    return np.exp(1j * (phase + line.real))


def I_full(d, pot: MagneticPotential, lattice: Lattice, N2: int = 128) -> complex:
    """Direct 2-D quadrature of the first invariant for the lattice vector d.

    I(d) = int_D exp(-i A0(d).x + i int_0^1 d.A(x + s d) ds) dx over the
    fundamental domain, computed on an N2 x N2 uniform grid in lattice
    coordinates (Jacobian = Area). Independent of the 1-D reduction; used
    to cross-check Area * F_k(delta_hat).
    """
    if N2 < 64:
        raise ValueError("N2 must be >= 64 per axis")
    X = _torus_grid(lattice, N2)
    integrand = _oscillatory_phase(d, pot, lattice, X)
    return complex(lattice.area * integrand.mean())


def J_full_Vpart(d, V: FourierField2D, pot: MagneticPotential,
                 lattice: Lattice, N2: int = 128) -> complex:
    """The V part of the second invariant by direct 2-D quadrature.

    Same oscillatory phase as I_full, weighted by the closed-form line
    average int_0^1 V(x + s d) ds (only beta.d = 0 modes survive).
    """
    if N2 < 64:
        raise ValueError("N2 must be >= 64 per axis")
    dm, dn = int(d[0]), int(d[1])
    X = _torus_grid(lattice, N2)
    bracket = np.full(X.shape[:-1], float(V.mean), dtype=complex)
    for (m, n), c in V.coeffs.items():
        if m * dm + n * dn == 0:
            beta = lattice.dual_vector(m, n)
            bracket += c * np.exp(TWO_PI_I * (X @ beta))
    integrand = bracket.real * _oscillatory_phase(d, pot, lattice, X)
    return complex(lattice.area * integrand.mean())


def default_quadrature_points(K: int, l: int, bandwidth: int) -> int:
    """Oversample past the highest oscillation: max(256, 16 K |l|, 16 bw)."""
    return max(256, 16 * K * abs(l), 16 * bandwidth)


def compute_invariant_set(B: FourierField2D, V: FourierField2D,
                          max_primitive_norm: int, K: int,
                          N: Optional[int] = None) -> InvariantSet:
    """F_k and G_k for every canonical primitive direction and k = 1..K.

    Preconditions: the flux integer of B.mean is +1 or -1, and the
    hypothesis margin of B is positive (else HypothesisError carrying the
    computed margin). Results are ordered by direction, lexicographically;
    the whole computation is deterministic.
    """
    lattice = B.lattice
    if V.lattice != lattice:
        raise ValueError("B and V must share one lattice")
    l_frac = flux_integer(lattice, B.mean)
    if l_frac is None or abs(l_frac) != 1:
        shown = "non-quantized" if l_frac is None else str(l_frac)
        raise ValueError(f"flux integer must be +1 or -1, got {shown}")
    l = int(l_frac)
    bw = max(B.bandwidth(), V.bandwidth())
    margin = hypothesis_margin(B, grid=max(64, 4 * B.bandwidth()))
    if margin <= 0:
        raise HypothesisError(margin)
    if K < 1:
        raise ValueError("K must be >= 1")
    if N is None:
        N = default_quadrature_points(K, l, bw)
    _check_quadrature(N, K * l, bw)

    b0 = B.mean
    s = np.arange(N) / N
    ks = np.arange(1, K + 1)
    F, G = {}, {}
    dirs = enumerate_primitive_directions(max_primitive_norm)
    for delta in dirs:
        a1 = profile_antiderivative(project_direction(B, delta))
        y = y_map(a1, b0, s)
        E = np.exp(-TWO_PI_I * l * ks[:, None] * y[None, :])
        F[delta] = E.mean(axis=1)
        vd = project_direction(V, delta)
        v = eval_profile_real(vd, s) if vd.coeffs else np.zeros(N)
        G[delta] = (E * v[None, :]).mean(axis=1)
    return InvariantSet(lattice, b0, l, K, N, lattice.area, tuple(dirs), F, G)


def truncate_invariants(inv: InvariantSet, K: int) -> InvariantSet:
    """The same invariant set restricted to harmonics k <= K."""
    if not 1 <= K <= inv.K:
        raise ValueError(f"K must lie in 1..{inv.K}")
    F = {d: inv.F[d][:K].copy() for d in inv.directions}
    G = {d: inv.G[d][:K].copy() for d in inv.directions}
    return InvariantSet(inv.lattice, inv.b0, inv.l, K, inv.N, inv.c,
                        inv.directions, F, G)


def tail_magnitude(F: np.ndarray) -> float:
    """max |F_k| over the top half of the stored harmonics (k > K/2).

    A truncation diagnostic: decays with K whenever the invariants decay.
    """
    K = len(F)
    return float(np.max(np.abs(F[K // 2:])))


# ---------------------------------------------------------------------------
# invariant file format: header (lattice, b0, l, K, N), then one record per
# (direction, k). repr floats keep the save/load round trip bit-exact.

_KV_LINE = re.compile(r"^\s*(\w+)\s*=\s*(\S+)\s*$")


def save_invariants(inv: InvariantSet, path) -> None:
    lines = ["# torus invariants\n", format_lattice_block(inv.lattice)]
    lines.append(f"b0 = {float(inv.b0)!r}\n")
    lines.append(f"l = {inv.l}\n")
    lines.append(f"K = {inv.K}\n")
    lines.append(f"N = {inv.N}\n")
    lines.append("# delta_a delta_b k Fre Fim Gre Gim\n")
    for delta in inv.directions:
        Fd, Gd = inv.F[delta], inv.G[delta]
        for i in range(inv.K):
            f, g = complex(Fd[i]), complex(Gd[i])
            lines.append(
                f"{delta.a} {delta.b} {i + 1} "
                f"{f.real!r} {f.imag!r} {g.real!r} {g.imag!r}\n"
            )
    with open(path, "w") as fh:
        fh.writelines(lines)


def load_invariants(path) -> InvariantSet:
    with open(path) as fh:
        lines = fh.readlines()
    lattice = parse_lattice_block(lines)
    header = {}
    for line in lines:
        m = _KV_LINE.match(line)
        if m and m.group(1) in ("b0", "l", "K", "N"):
            header[m.group(1)] = m.group(2)
    for key in ("b0", "l", "K", "N"):
        if key not in header:
            raise ValueError(f"invariant file is missing the {key} header")
    b0 = float(header["b0"])
    l, K, N = int(header["l"]), int(header["K"]), int(header["N"])
    F, G = {}, {}
    for lineno, line in enumerate(lines, 1):
        parts = line.split()
        if len(parts) == 7 and not line.lstrip().startswith("#"):
            try:
                a, b, k = int(parts[0]), int(parts[1]), int(parts[2])
                fre, fim, gre, gim = (float(p) for p in parts[3:])
            except ValueError as err:
                raise ValueError(f"{path}:{lineno}: malformed invariant record: {err}")
            delta = PrimitiveDirection(a, b)
            if delta not in F:
                F[delta] = np.zeros(K, dtype=complex)
                G[delta] = np.zeros(K, dtype=complex)
            if not 1 <= k <= K:
                raise ValueError(f"record for direction ({a},{b}) has k = {k} outside 1..{K}")
            F[delta][k - 1] = complex(fre, fim)
            G[delta][k - 1] = complex(gre, gim)
    directions = tuple(sorted(F, key=lambda d: (d.a, d.b)))
    return InvariantSet(lattice, b0, l, K, N, lattice.area, directions, F, G)
