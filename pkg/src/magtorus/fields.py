"""Periodic scalar fields on the torus and the magnetic potential.

A real field is a finite Fourier sum

    f(x) = mean + sum_beta c_beta e^{2 pi i beta.x},

over dual indices beta = m*e1s + n*e2s, with Hermitian coefficients
(c at -beta equals conj(c at beta)) and the mean stored out of band so
mean-zero constraints are structural.

The magnetic potential splits as A = A0 + A1 with A0 = (b0/2)(x2, -x1)
carrying the mean of B, and A1 a mean-zero periodic vector field in the
divergence-free gauge; both satisfy the curl convention
d2 A1 - d1 A2 = B (checked spectrally in the tests).

Directional profiles are the 1-D slices B_delta(s) = sum_p b_{p delta}
e^{2 pi i p s} obtained by averaging the field along the lattice line
orthogonal to the dual direction delta.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field as dc_field

import numpy as np

from .lattice import Lattice, PrimitiveDirection, b0_for_unit_flux, format_lattice_block, parse_lattice_block

__all__ = [
    "FourierField2D",
    "MagneticPotential",
    "DirectionalProfile",
    "eval_field",
    "build_potential",
    "eval_A",
    "project_direction",
    "profile_antiderivative",
    "profile_derivative",
    "eval_profile",
    "eval_profile_real",
    "hypothesis_margin",
    "line_average",
    "random_admissible_field",
    "random_mean_zero_field",
    "save_field",
    "load_field",
]

TWO_PI_I = 2j * math.pi


def _hermitian_complete(coeffs: dict) -> dict:
    """Fill missing conjugate partners; reject inconsistent pairs."""
    out = {}
    for (m, n), c in coeffs.items():
        m, n = int(m), int(n)
        if (m, n) == (0, 0):
            raise ValueError("the (0, 0) coefficient is the mean; store it out of band")
        c = complex(c)
        out[(m, n)] = c
    for (m, n), c in list(out.items()):
        partner = (-m, -n)
        if partner in out:
            if abs(out[partner] - c.conjugate()) > 1e-12 * max(1.0, abs(c)):
                raise ValueError(
                    f"coefficients at ({m},{n}) and ({-m},{-n}) break conjugate symmetry"
                )
        else:
            out[partner] = c.conjugate()
    return out


@dataclass(frozen=True, eq=False)
class FourierField2D:
    """Real periodic scalar field as a finite Fourier coefficient map.

    coeffs maps (m, n) to the complex coefficient of e^{2 pi i beta.x},
    beta = m*e1s + n*e2s. Either one half-plane or both may be given;
    missing conjugate partners are filled in, inconsistent ones rejected.
    """

    lattice: Lattice
    mean: float
    coeffs: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "mean", float(self.mean))
        object.__setattr__(self, "coeffs", _hermitian_complete(self.coeffs))

    def support(self) -> list:
        return sorted(self.coeffs)

    def bandwidth(self) -> int:
        """Max sup-norm of the support (0 for a constant field)."""
        if not self.coeffs:
            return 0
        return max(max(abs(m), abs(n)) for m, n in self.coeffs)

    def max_coeff(self) -> float:
        if not self.coeffs:
            return 0.0
        return max(abs(c) for c in self.coeffs.values())


def _dual_array(lattice: Lattice, indices) -> np.ndarray:
    idx = np.array(indices, dtype=float).reshape(-1, 2)
    return idx @ lattice.dual_matrix()


def eval_field(field: FourierField2D, x) -> np.ndarray:
    """Evaluate the field at Cartesian x (shape (..., 2)); real output.

    The Hermitian sum is real up to round-off; the imaginary residue is
    checked against 1e-12 of the field scale.
    """
    x = np.asarray(x, dtype=float)
    if not field.coeffs:
        return np.broadcast_to(np.asarray(field.mean), x.shape[:-1]).copy() if x.ndim > 1 else float(field.mean)
    indices = field.support()
    betas = _dual_array(field.lattice, indices)  # (nc, 2)
    cvec = np.array([field.coeffs[i] for i in indices])
    phases = np.exp(TWO_PI_I * (x @ betas.T))
    total = phases @ cvec
    scale = float(field.mean) if field.mean != 0 else 1.0
    scale = max(abs(scale), float(np.max(np.abs(total))), 1e-30)
    assert np.max(np.abs(total.imag)) <= 1e-12 * scale, "field evaluation is not real"
    out = field.mean + total.real
    return out if out.ndim else float(out)


@dataclass(frozen=True, eq=False)
class MagneticPotential:
    """A = A0 + A1: A0 = (b0/2)(x2, -x1), A1 = sum_beta c_beta e^{2 pi i beta.x}.

    a1coeffs maps (m, n) to a complex 2-vector c_beta. Potentials built by
    build_potential are divergence-free (beta . c_beta = 0) and satisfy
    d2 A1_1 - d1 A1_2 = B coefficient-wise; gauge-shifted potentials may
    be constructed directly and need not be divergence-free.
    """

    lattice: Lattice
    b0: float
    a1coeffs: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "b0", float(self.b0))
        clean = {}
        for (m, n), c in self.a1coeffs.items():
            clean[(int(m), int(n))] = np.asarray(c, dtype=complex).reshape(2)
        object.__setattr__(self, "a1coeffs", clean)


def build_potential(B: FourierField2D) -> MagneticPotential:
    """Magnetic potential of B in the periodic divergence-free gauge.

    For each beta != 0 with Cartesian components (b1, b2):
        c_beta = b_beta * (b2, -b1) / (2 pi i (b1^2 + b2^2)),
    and A0 carries the mean b0. Then d2 A1 - d1 A2 reproduces B - b0
    coefficient-wise and beta . c_beta = 0.
    """
    coeffs = {}
    for (m, n), b in B.coeffs.items():
        beta = B.lattice.dual_vector(m, n)
        norm2 = float(beta @ beta)
        coeffs[(m, n)] = b * np.array([beta[1], -beta[0]]) / (TWO_PI_I * norm2)
    return MagneticPotential(B.lattice, B.mean, coeffs)


def eval_A(pot: MagneticPotential, x) -> np.ndarray:
    """Evaluate A = A0 + A1 at Cartesian x (shape (..., 2)); real 2-vectors."""
    x = np.asarray(x, dtype=float)
    a0 = 0.5 * pot.b0 * np.stack([x[..., 1], -x[..., 0]], axis=-1)
    if not pot.a1coeffs:
        return a0
    indices = sorted(pot.a1coeffs)
    betas = _dual_array(pot.lattice, indices)
    cmat = np.array([pot.a1coeffs[i] for i in indices])  # (nc, 2)
    phases = np.exp(TWO_PI_I * (x @ betas.T))  # (..., nc)
    a1 = phases @ cmat  # (..., 2)
    assert np.max(np.abs(a1.imag)) <= 1e-10 * max(1.0, float(np.max(np.abs(a1)))), \
        "A1 evaluation is not real"
    return a0 + a1.real


@dataclass(frozen=True, eq=False)
class DirectionalProfile:
    """1-periodic Fourier series sum_p c_p e^{2 pi i p s}, p != 0 unless noted.

    mean_zero records that no p = 0 term is present (true for all profiles
    produced by projection: the field mean is stored out of band).
    """

    coeffs: dict = dc_field(default_factory=dict)
    mean_zero: bool = True

    def __post_init__(self):
        clean = {int(p): complex(c) for p, c in self.coeffs.items()}
        if self.mean_zero and 0 in clean:
            raise ValueError("mean-zero profile cannot carry a p = 0 coefficient")
        object.__setattr__(self, "coeffs", clean)

    def bandwidth(self) -> int:
        return max((abs(p) for p in self.coeffs), default=0)


def eval_profile(profile: DirectionalProfile, s) -> np.ndarray:
    """Complex value of the series at s (scalar or array)."""
    s = np.asarray(s, dtype=float)
    total = np.zeros(s.shape, dtype=complex)
    for p, c in profile.coeffs.items():
        total += c * np.exp(TWO_PI_I * p * s)
    return total


def eval_profile_real(profile: DirectionalProfile, s) -> np.ndarray:
    """Real value of a Hermitian series; asserts the imaginary residue."""
    total = eval_profile(profile, s)
    scale = max(1e-30, float(np.max(np.abs(total))), 1.0)
    assert np.max(np.abs(total.imag)) <= 1e-12 * scale, "profile is not real"
    out = total.real
    return out if out.ndim else float(out)


def project_direction(field: FourierField2D, delta: PrimitiveDirection) -> DirectionalProfile:
    """Directional profile of the field along the dual direction delta.

    The coefficient at p is the field coefficient at dual index p*delta,
    so b0 + B_delta(delta.x) is the average of B over the lattice line
    through x orthogonal to delta (the closed-form X-ray slice).
    """
    a, b = delta.a, delta.b
    sup = max(abs(a), abs(b))
    pmax = field.bandwidth() // sup if sup else 0
    coeffs = {}
    for p in range(-pmax, pmax + 1):
        if p == 0:
            continue
        c = field.coeffs.get((p * a, p * b))
        if c is not None:
            coeffs[p] = c
    return DirectionalProfile(coeffs)


def profile_derivative(profile: DirectionalProfile) -> DirectionalProfile:
    """Termwise d/ds: coefficient at p maps to 2 pi i p c_p."""
    return DirectionalProfile({p: TWO_PI_I * p * c for p, c in profile.coeffs.items()})


def profile_antiderivative(profile: DirectionalProfile) -> DirectionalProfile:
    """The mean-zero periodic antiderivative: c_p -> c_p / (2 pi i p).

    Rejects profiles with a p = 0 term (their antiderivative is not
    periodic). Exact right inverse of profile_derivative on coefficients.
    """
    if 0 in profile.coeffs:
        raise ValueError("profile has a p = 0 coefficient; antiderivative is not periodic")
    return DirectionalProfile({p: c / (TWO_PI_I * p) for p, c in profile.coeffs.items()})


def hypothesis_margin(B: FourierField2D, grid: int = 128) -> float:
    """|b0| - max |B(x) - b0| over a grid x grid sample of the torus.

    Positive iff the mean dominates the oscillation (the monotone-map
    hypothesis), up to grid resolution. grid must oversample the field
    bandwidth by a factor of at least 4.
    """
    bw = B.bandwidth()
    if grid < max(1, 4 * bw):
        raise ValueError(f"grid {grid} must be >= 4 * bandwidth = {4 * bw}")
    if not B.coeffs:
        return abs(B.mean)
    s = np.arange(grid) / grid
    pts = B.lattice.point(s[:, None], s[None, :])
    dev = eval_field(B, pts) - B.mean
    return abs(B.mean) - float(np.max(np.abs(dev)))


def line_average(field: FourierField2D, x, d) -> float:
    """Average of the field over {x + t*d : t in [0, 1]} for a lattice vector d.

    Closed form: oscillatory terms with beta.d != 0 integrate to zero
    exactly, so the average is mean + sum over beta.d = 0 of the term
    value at x. d is given in integer lattice coordinates (dm, dn);
    beta.d = m*dm + n*dn is exact integer arithmetic.
    """
    dm, dn = int(d[0]), int(d[1])
    x = np.asarray(x, dtype=float)
    total = complex(0.0)
    for (m, n), c in field.coeffs.items():
        if m * dm + n * dn == 0:
            beta = field.lattice.dual_vector(m, n)
            total += c * np.exp(TWO_PI_I * float(beta @ x))
    assert abs(total.imag) <= 1e-12 * max(1.0, abs(total))
    return field.mean + total.real


def _half_plane_indices(max_index: int) -> list:
    # one representative per +- pair, fixed order for reproducible draws
    out = []
    for n in range(0, max_index + 1):
        for m in range(-max_index, max_index + 1):
            if (m, n) == (0, 0):
                continue
            if n > 0 or (n == 0 and m > 0):
                out.append((m, n))
    return sorted(out)


def _random_hermitian_coeffs(rng, max_index: int) -> dict:
    coeffs = {}
    for m, n in _half_plane_indices(max_index):
        re, im = rng.standard_normal(2)
        coeffs[(m, n)] = (re + 1j * im) / (1.0 + abs(m) + abs(n))
    return coeffs


def _peak_deviation(lattice: Lattice, coeffs: dict, max_index: int) -> float:
    probe = FourierField2D(lattice, 0.0, coeffs)
    grid = max(64, 8 * max_index)
    s = np.arange(grid) / grid
    pts = lattice.point(s[:, None], s[None, :])
    return float(np.max(np.abs(eval_field(probe, pts))))


def random_admissible_field(seed: int, lattice: Lattice, max_index: int,
                            target_margin: float, sign: int = 1) -> FourierField2D:
    """Random unit-flux field B with hypothesis margin >= target_margin * |b0|.

    Deterministic for a fixed seed. b0 = b0_for_unit_flux(lattice, sign);
    Hermitian coefficients are drawn with a mild 1/(1 + |m| + |n|) decay
    and rescaled so max |B - b0| = (1 - target_margin) |b0| up to grid
    resolution (a 0.998 safety factor keeps the margin on the right side).
    """
    if not 0.0 < target_margin < 1.0:
        raise ValueError("target_margin must lie in (0, 1)")
    b0 = b0_for_unit_flux(lattice, sign)
    if max_index == 0:
        return FourierField2D(lattice, b0, {})
    rng = np.random.default_rng(seed)
    coeffs = _random_hermitian_coeffs(rng, max_index)
    peak = _peak_deviation(lattice, coeffs, max_index)
    scale = 0.998 * (1.0 - target_margin) * abs(b0) / peak
    coeffs = {k: scale * c for k, c in coeffs.items()}
    return FourierField2D(lattice, b0, coeffs)


def random_mean_zero_field(seed: int, lattice: Lattice, max_index: int,
                           scale: float = 1.0) -> FourierField2D:
    """Random mean-zero field (electric potential test data), peak ~= scale."""
    if max_index == 0:
        return FourierField2D(lattice, 0.0, {})
    rng = np.random.default_rng(seed)
    coeffs = _random_hermitian_coeffs(rng, max_index)
    peak = _peak_deviation(lattice, coeffs, max_index)
    coeffs = {k: scale * c / peak for k, c in coeffs.items()}
    return FourierField2D(lattice, 0.0, coeffs)


# ---------------------------------------------------------------------------
# field file format: lattice block, mean, then one record per coefficient.
# Both half-planes are stored; the loader validates conjugate symmetry and
# names the offending record. Full-precision repr keeps round-trips
# bit-exact.

_MEAN_LINE = re.compile(r"^\s*mean\s*=\s*(\S+)\s*$")


def save_field(field: FourierField2D, path) -> None:
    lines = ["# torus field\n", format_lattice_block(field.lattice)]
    lines.append(f"mean = {float(field.mean)!r}\n")
    lines.append("# m n re im\n")
    for m, n in field.support():
        c = complex(field.coeffs[(m, n)])
        lines.append(f"{m} {n} {c.real!r} {c.imag!r}\n")
    with open(path, "w") as fh:
        fh.writelines(lines)


def load_field(path) -> FourierField2D:
    with open(path) as fh:
        lines = fh.readlines()
    lattice = parse_lattice_block(lines)
    mean = None
    records = {}
    for line in lines:
        mm = _MEAN_LINE.match(line)
        if mm:
            mean = float(mm.group(1))
            continue
        parts = line.split()
        if len(parts) == 4 and not line.lstrip().startswith("#"):
            try:
                m, n = int(parts[0]), int(parts[1])
                c = complex(float(parts[2]), float(parts[3]))
            except ValueError:
                continue
            records[(m, n)] = c
    if mean is None:
        raise ValueError("field file has no mean line")
    for (m, n), c in records.items():
        partner = records.get((-m, -n))
        if partner is None:
            raise ValueError(f"record ({m},{n}) has no conjugate partner ({-m},{-n})")
        if abs(partner - c.conjugate()) > 1e-12 * max(1.0, abs(c)):
            raise ValueError(f"record ({m},{n}) breaks conjugate symmetry")
    return FourierField2D(lattice, mean, records)
