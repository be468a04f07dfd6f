"""Reconstruction of B and V from the invariants.

Per direction, the pipeline inverts the forward reduction:

1. s'(y) = 1 + sum_k 2 Re(F_k e^{2 pi i k y}) (F_0 = 1 because the mean
   of the pushforward density over a period is 1). Strict positivity of
   the synthesis is exactly the reconstruction hypothesis; failure is
   reported, not patched.
2. s(y) = y + sum_k 2 Re(F_k e^{2 pi i k y} / (2 pi i k)): the spectral
   antiderivative of the sampled s' (an FFT recovers the coefficients
   exactly for M >= 4K, and the constant of integration is zero because
   A1_delta is mean-zero by construction).
3. y(s) on the s-grid by bracketed Newton iteration (the periodic part of
   s(y) is bounded by sum 2|F_k|/(2 pi k), which brackets each root; a
   bisection step substitutes whenever the Newton step leaves its
   bracket).
4. A1_delta(s) = b0 (y(s) - s); B_delta = spectral derivative of its
   uniform-grid trigonometric fit. V_delta(s) = g(y(s)) / s'(y(s)) with
   g synthesized from the G_k.

For a flux integer l = -1 the stored coefficients satisfy
hat{s'}(k) = conj(F_k); the driver conjugates before synthesis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .fields import (
    DirectionalProfile,
    FourierField2D,
    hypothesis_margin,
    project_direction,
)
from .invariants import InvariantSet, compute_invariant_set
from .lattice import Lattice, PrimitiveDirection

__all__ = [
    "MonotoneMap",
    "MonotonicityError",
    "ReconstructionReport",
    "synthesize_sprime",
    "build_monotone_map",
    "recover_Bdelta",
    "recover_Vdelta",
    "assemble_field",
    "invert_invariants",
    "coefficient_errors",
    "roundtrip",
    "format_report",
    "report_rows",
]

TWO_PI_I = 2j * math.pi
NEWTON_TOL = 1e-12
NEWTON_MAX = 50
BISECT_MAX = 200


class MonotonicityError(RuntimeError):
    """The synthesized density s'(y) is not strictly positive.

    Either the reconstruction hypothesis |b0| > max|B - b0| fails or the
    harmonic cutoff K is too small for the decay of the invariants.
    """

    def __init__(self, min_value: float, direction: Optional[PrimitiveDirection] = None):
        self.min_value = float(min_value)
        self.direction = direction
        where = f" at direction {direction}" if direction is not None else ""
        super().__init__(
            f"synthesized s' is not strictly positive{where}: min = {self.min_value:.6g}"
        )


def synthesize_sprime(F, M: int) -> np.ndarray:
    """Samples of s'(y) = 1 + sum_{k=1..K} 2 Re(F_k e^{2 pi i k y}) on the M-grid.

    M >= 4K keeps the later trigonometric fits exact. Raises
    MonotonicityError when the synthesis is not strictly positive.
    """
    F = np.asarray(F, dtype=complex)
    K = len(F)
    if M < 4 * K:
        raise ValueError(f"M = {M} must be >= 4K = {4 * K}")
    y = np.arange(M) / M
    ks = np.arange(1, K + 1)
    sp = 1.0 + 2.0 * np.real(np.exp(TWO_PI_I * y[:, None] * ks[None, :]) @ F)
    if sp.min() <= 0.0:
        raise MonotonicityError(sp.min())
    return sp


@dataclass(frozen=True, eq=False)
class MonotoneMap:
    """The monotone change of variable and its inverse, sampled and exact.

    m is the grid resolution; y_of_s holds y(s) on the uniform s-grid,
    s_of_y and sprime_of_y hold s(y) and s'(y) on the uniform y-grid.
    c0 and ck are the trigonometric coefficients of s'(y) (c0 is 1 up to
    round-off), so s and s' evaluate exactly anywhere; the map extends
    quasi-periodically, s(y + 1) = s(y) + 1.
    """

    m: int
    y_of_s: np.ndarray
    s_of_y: np.ndarray
    sprime_of_y: np.ndarray
    c0: float
    ck: np.ndarray

    def s_at(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        ks = np.arange(1, len(self.ck) + 1)
        anti = self.ck / (TWO_PI_I * ks)
        out = self.c0 * y + 2.0 * np.real(
            np.exp(TWO_PI_I * y[..., None] * ks) @ anti
        )
        return out if out.ndim else float(out)

    def sprime_at(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        ks = np.arange(1, len(self.ck) + 1)
        out = self.c0 + 2.0 * np.real(
            np.exp(TWO_PI_I * y[..., None] * ks) @ self.ck
        )
        return out if out.ndim else float(out)


def build_monotone_map(sprime) -> MonotoneMap:
    """Monotone map from positive s'(y) samples on the uniform grid.

    s(y) comes from the spectral antiderivative of the sampled series
    (exact for the trigonometric polynomial the samples represent), with
    the constant of integration zero: that pins int_0^1 (y(s) - s) ds = 0,
    the mean-zero normalization of A1_delta. y(s) solves s(y) = s_j by
    bracketed Newton (bisection fallback), tolerance 1e-12.
    """
    sprime = np.asarray(sprime, dtype=float)
    M = len(sprime)
    if sprime.min() <= 0.0:
        raise MonotonicityError(sprime.min())
    fh = np.fft.fft(sprime) / M
    ck = fh[1: M // 2].copy()
    c0 = float(fh[0].real)
    ygrid = np.arange(M) / M

    mp = MonotoneMap(M, np.empty(0), np.empty(0), sprime, c0, ck)
    s_of_y = mp.s_at(ygrid)

    # each root y(s_j) lies within rho of s_j: |s(y) - y| <= sum 2|ck|/(2 pi k)
    ks = np.arange(1, len(ck) + 1)
    rho = float(2.0 * np.sum(np.abs(ck) / (2.0 * math.pi * ks))) + 1e-12
    sgrid = ygrid
    lo = sgrid - rho
    hi = sgrid + rho
    yv = sgrid.copy()
    converged = False
    for it in range(BISECT_MAX):
        r = mp.s_at(yv) - sgrid
        if np.max(np.abs(r)) < NEWTON_TOL:
            converged = True
            break
        lo = np.where(r < 0, np.maximum(lo, yv), lo)
        hi = np.where(r >= 0, np.minimum(hi, yv), hi)
        if it < NEWTON_MAX:
            cand = yv - r / mp.sprime_at(yv)
            outside = (cand <= lo) | (cand >= hi)
            yv = np.where(outside, 0.5 * (lo + hi), cand)
        else:
            yv = 0.5 * (lo + hi)
    if not converged:
        raise RuntimeError("bisection failed to invert a monotone map; this "
                           "should be impossible for positive s' samples")

    out = MonotoneMap(M, yv, s_of_y, sprime, c0, ck)
    dy = np.diff(out.y_of_s)
    assert np.all(dy > 0), "y(s) samples are not strictly increasing"
    comp = float(np.max(np.abs(out.s_at(out.y_of_s) - sgrid)))
    assert comp <= 1e-9, f"composition residual {comp:.3g} exceeds 1e-9"
    return out


def recover_Bdelta(mp: MonotoneMap, b0: float, kmax: Optional[int] = None) -> DirectionalProfile:
    """B_delta from the map: A1_delta(s) = b0 (y(s) - s), then the
    spectral derivative of its uniform-grid trigonometric fit."""
    M = mp.m
    if kmax is None:
        kmax = M // 4
    sgrid = np.arange(M) / M
    a1 = b0 * (mp.y_of_s - sgrid)
    ah = np.fft.fft(a1) / M
    coeffs = {}
    for p in range(1, kmax + 1):
        c = TWO_PI_I * p * ah[p]
        coeffs[p] = c
        coeffs[-p] = c.conjugate()
    return DirectionalProfile(coeffs)


def recover_Vdelta(G, mp: MonotoneMap) -> DirectionalProfile:
    """V_delta from the G coefficients and the monotone map.

    g(y) = sum_k 2 Re(G_k e^{2 pi i k y}) is the pushforward
    V_delta(s(y)) s'(y) (mean zero because V has no mean); pulling back,
    V_delta(s) = g(y(s)) / s'(y(s)), fitted on the uniform s-grid.
    """
    G = np.asarray(G, dtype=complex)
    K = len(G)
    M = mp.m
    sgrid = np.arange(M) / M
    ks = np.arange(1, K + 1)
    g_at_y = 2.0 * np.real(np.exp(TWO_PI_I * mp.y_of_s[:, None] * ks[None, :]) @ G)
    v_samples = g_at_y / mp.sprime_at(mp.y_of_s)
    vh = np.fft.fft(v_samples) / M
    coeffs = {}
    for p in range(1, K + 1):
        coeffs[p] = complex(vh[p])
        coeffs[-p] = complex(vh[p]).conjugate()
    return DirectionalProfile(coeffs)


def assemble_field(profiles: dict, lattice: Lattice, mean: float) -> FourierField2D:
    """Place profile coefficients at beta = p * delta for every direction.

    Unique primitive factorization guarantees each nonzero dual index is
    claimed by exactly one canonical direction; a duplicate assignment
    indicates inconsistent canonicalization and is an internal error.
    """
    coeffs = {}
    for delta in sorted(profiles, key=lambda d: (d.a, d.b)):
        for p, c in sorted(profiles[delta].coeffs.items()):
            beta = (p * delta.a, p * delta.b)
            if beta in coeffs:
                raise RuntimeError(f"duplicate coefficient assignment at {beta}")
            coeffs[beta] = c
    return FourierField2D(lattice, mean, coeffs)


def invert_invariants(inv: InvariantSet, M: int = 512):
    """Reconstruct (B, V, monotone maps) from an invariant set.

    Monotonicity failures carry the offending direction. For l = -1 the
    coefficient arrays are conjugated (hat{s'}(k) = conj(F_k)).
    """
    bprofs, vprofs, maps = {}, {}, {}
    for delta in inv.directions:
        Fd = inv.F[delta] if inv.l == 1 else np.conj(inv.F[delta])
        Gd = inv.G[delta] if inv.l == 1 else np.conj(inv.G[delta])
        try:
            sp = synthesize_sprime(Fd, M)
            mp = build_monotone_map(sp)
        except MonotonicityError as err:
            raise MonotonicityError(err.min_value, direction=delta) from err
        maps[delta] = mp
        bprofs[delta] = recover_Bdelta(mp, inv.b0, kmax=inv.K)
        vprofs[delta] = recover_Vdelta(Gd, mp)
    B_rec = assemble_field(bprofs, inv.lattice, inv.b0)
    V_rec = assemble_field(vprofs, inv.lattice, 0.0)
    return B_rec, V_rec, maps


def coefficient_errors(true: FourierField2D, rec: FourierField2D):
    """(relative L-inf, relative L2) error over the union of supports.

    Normalized by the true field's coefficient norms; absolute when the
    true field is constant (so a perfect zero reconstruction reports 0).
    """
    keys = sorted(set(true.coeffs) | set(rec.coeffs))
    if not keys:
        return 0.0, 0.0
    diffs = np.array([abs(true.coeffs.get(k, 0.0) - rec.coeffs.get(k, 0.0)) for k in keys])
    mags = np.array([abs(c) for c in true.coeffs.values()]) if true.coeffs else np.array([])
    linf = float(diffs.max())
    l2 = float(np.sqrt(np.sum(diffs ** 2)))
    if mags.size:
        linf /= float(mags.max())
        l2 /= float(np.sqrt(np.sum(mags ** 2)))
    return linf, l2


def _trimmed(field: FourierField2D, rel_tol: float = 1e-9) -> FourierField2D:
    # drop round-off dust so diagnostic grid sizes track the real content
    top = field.max_coeff()
    if top == 0.0:
        return FourierField2D(field.lattice, field.mean, {})
    kept = {k: c for k, c in field.coeffs.items() if abs(c) > rel_tol * top}
    return FourierField2D(field.lattice, field.mean, kept)


@dataclass(frozen=True, eq=False)
class ReconstructionReport:
    """Reconstructed fields plus per-direction and global error metrics."""

    B: FourierField2D
    V: FourierField2D
    b_error_linf: float
    b_error_l2: float
    v_error_linf: float
    v_error_l2: float
    per_direction: dict
    margin: float
    K: int
    directions: tuple


def _per_direction_errors(Btrue, Vtrue, Brec, Vrec, directions):
    bscale = Btrue.max_coeff() or 1.0
    vscale = Vtrue.max_coeff() or 1.0
    out = {}
    for delta in directions:
        tb = project_direction(Btrue, delta).coeffs
        rb = project_direction(Brec, delta).coeffs
        tv = project_direction(Vtrue, delta).coeffs
        rv = project_direction(Vrec, delta).coeffs
        eb = max((abs(tb.get(p, 0.0) - rb.get(p, 0.0)) for p in set(tb) | set(rb)),
                 default=0.0) / bscale
        ev = max((abs(tv.get(p, 0.0) - rv.get(p, 0.0)) for p in set(tv) | set(rv)),
                 default=0.0) / vscale
        out[delta] = (eb, ev)
    return out


def roundtrip(B: FourierField2D, V: FourierField2D, max_primitive_norm: int = 4,
              K: int = 64, M: int = 512, N: Optional[int] = None) -> ReconstructionReport:
    """Forward invariants, inversion, reassembly, and error accounting."""
    inv = compute_invariant_set(B, V, max_primitive_norm, K, N)
    B_rec, V_rec, _ = invert_invariants(inv, M)
    return build_report(B, V, B_rec, V_rec, inv)


def build_report(Btrue, Vtrue, B_rec, V_rec, inv: InvariantSet) -> ReconstructionReport:
    b_linf, b_l2 = coefficient_errors(Btrue, B_rec)
    v_linf, v_l2 = coefficient_errors(Vtrue, V_rec)
    trimmed = _trimmed(B_rec)
    margin = hypothesis_margin(trimmed, grid=max(64, 4 * trimmed.bandwidth()))
    per_dir = _per_direction_errors(Btrue, Vtrue, B_rec, V_rec, inv.directions)
    return ReconstructionReport(B_rec, V_rec, b_linf, b_l2, v_linf, v_l2,
                                per_dir, margin, inv.K, inv.directions)


def report_rows(report: ReconstructionReport) -> list:
    """Per-direction error table rows: (delta_a, delta_b, b_err, v_err)."""
    return [(d.a, d.b, report.per_direction[d][0], report.per_direction[d][1])
            for d in report.directions]


def format_report(report: ReconstructionReport) -> str:
    lines = [
        "reconstruction report",
        f"directions: {len(report.directions)}   K: {report.K}",
        f"margin of reconstructed B: {report.margin!r}",
        f"B coefficient error: Linf {report.b_error_linf!r}  L2 {report.b_error_l2!r}",
        f"V coefficient error: Linf {report.v_error_linf!r}  L2 {report.v_error_l2!r}",
        "per-direction max coefficient error (B, V):",
    ]
    for a, b, eb, ev in report_rows(report):
        lines.append(f"  ({a},{b}): {eb!r} {ev!r}")
    return "\n".join(lines) + "\n"
