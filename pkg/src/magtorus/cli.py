"""Command-line front end: config-driven experiments on top of the library.

Subcommands
-----------
synth      draw a random admissible field pair and write field files
forward    compute the invariant set of saved field files
invert     reconstruct fields from a saved invariant file
roundtrip  synth + forward + invert in-process, with an error-vs-K sweep,
           CSV tables, and static plots
check      lattice diagnostics: genericity, flux integer, commutator phase,
           and the unit-flux sublattice suggestion when l = 1/q

Config file schema (plain text, 'key = value', '#' comments):

    e1 = [1.0, 0.0]        lattice basis vectors
    e2 = [0.3, 1.1]
    seed = 7               RNG seed (B uses seed, V uses seed + 1)
    bandwidth = 4          max Fourier index of the synthesized fields
    margin = 0.2           target hypothesis margin, fraction of |b0|
    b0_sign = 1            sign of the mean field
    b0 = auto              explicit mean field for 'check' (auto = unit flux)
    K = 64                 harmonics per direction
    M = 512                inversion grid resolution (M >= 4K)
    N = auto               forward quadrature points (auto = oversampled)
    N2 = 128               2-D cross-check grid, per axis
    max_dir = 4            sup-norm bound on primitive directions
    radius = 5.0           genericity scan radius for 'check'
    out = out              output directory

Flags override the config: --k, --seed, --out, --max-dir, --grid (the
forward quadrature N). Every subcommand is deterministic given the
config and seed; repeated runs write byte-identical data files.
"""

from __future__ import annotations

import argparse
import ast
import re
import sys
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .fields import (
    eval_field,
    hypothesis_margin,
    load_field,
    random_admissible_field,
    random_mean_zero_field,
    save_field,
)
from .invariants import (
    HypothesisError,
    compute_invariant_set,
    load_invariants,
    save_invariants,
    tail_magnitude,
    truncate_invariants,
)
from .inversion import (
    MonotonicityError,
    build_report,
    coefficient_errors,
    format_report,
    invert_invariants,
    report_rows,
)
from .lattice import (
    Lattice,
    b0_for_unit_flux,
    flux_integer,
    is_generic,
    unit_flux_sublattice,
)
from .operators import commutator_phase

__all__ = ["ExperimentConfig", "load_config", "main"]

SWEEP_KS = (4, 8, 16, 32, 64, 128)
HEATMAP_GRID = 64


@dataclass
class ExperimentConfig:
    e1: tuple = (1.0, 0.0)
    e2: tuple = (0.3, 1.1)
    seed: int = 7
    bandwidth: int = 4
    margin: float = 0.2
    b0_sign: int = 1
    b0: float | None = None
    K: int = 64
    M: int = 512
    N: int | None = None
    N2: int = 128
    max_dir: int = 4
    radius: float = 5.0
    out: str = "out"

    def lattice(self) -> Lattice:
        return Lattice(tuple(self.e1), tuple(self.e2))

    def b0_value(self) -> float:
        if self.b0 is not None:
            return float(self.b0)
        return b0_for_unit_flux(self.lattice(), self.b0_sign)

    def validate(self) -> None:
        if not 0.0 < self.margin < 1.0:
            raise ValueError("margin must lie in (0, 1)")
        if self.b0_sign not in (1, -1):
            raise ValueError("b0_sign must be +1 or -1")
        for name in ("K", "M", "N2", "max_dir"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.N is not None and self.N < 64:
            raise ValueError("N must be >= 64 (or auto)")
        if self.M < 4 * self.K:
            raise ValueError(f"M = {self.M} must be >= 4K = {4 * self.K}")
        if self.bandwidth < 0:
            raise ValueError("bandwidth must be >= 0")
        if self.radius <= 0:
            raise ValueError("radius must be positive")


_CFG_LINE = re.compile(r"^\s*([A-Za-z0-9_]+)\s*=\s*(.+?)\s*$")
_INT_KEYS = {"seed", "bandwidth", "b0_sign", "K", "M", "N2", "max_dir"}
_FLOAT_KEYS = {"margin", "radius"}
_VEC_KEYS = {"e1", "e2"}


def load_config(path) -> ExperimentConfig:
    cfg = ExperimentConfig()
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            m = _CFG_LINE.match(line)
            if not m:
                raise ValueError(f"{path}:{lineno}: cannot parse config line {raw!r}")
            key, val = m.group(1), m.group(2)
            if key in _VEC_KEYS:
                vec = ast.literal_eval(val)
                cfg = replace(cfg, **{key: (float(vec[0]), float(vec[1]))})
            elif key in _INT_KEYS:
                cfg = replace(cfg, **{key: int(val)})
            elif key in _FLOAT_KEYS:
                cfg = replace(cfg, **{key: float(val)})
            elif key in ("N", "b0"):
                parsed = None if val.lower() == "auto" else (int(val) if key == "N" else float(val))
                cfg = replace(cfg, **{key: parsed})
            elif key == "out":
                cfg = replace(cfg, out=val)
            else:
                raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
    return cfg


def _apply_overrides(cfg: ExperimentConfig, args) -> ExperimentConfig:
    if getattr(args, "k", None) is not None:
        cfg = replace(cfg, K=args.k)
    if getattr(args, "seed", None) is not None:
        cfg = replace(cfg, seed=args.seed)
    if getattr(args, "out", None) is not None:
        cfg = replace(cfg, out=args.out)
    if getattr(args, "max_dir", None) is not None:
        cfg = replace(cfg, max_dir=args.max_dir)
    if getattr(args, "grid", None) is not None:
        cfg = replace(cfg, N=args.grid)
    return cfg


def _outdir(cfg: ExperimentConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _synth_pair(cfg: ExperimentConfig):
    lat = cfg.lattice()
    B = random_admissible_field(cfg.seed, lat, cfg.bandwidth, cfg.margin, cfg.b0_sign)
    V = random_mean_zero_field(cfg.seed + 1, lat, cfg.bandwidth)
    return B, V


def cmd_synth(cfg: ExperimentConfig) -> int:
    B, V = _synth_pair(cfg)
    out = _outdir(cfg)
    save_field(B, out / "B.field")
    save_field(V, out / "V.field")
    margin = hypothesis_margin(B, grid=max(64, 4 * B.bandwidth()))
    l = flux_integer(cfg.lattice(), B.mean)
    print(f"wrote {out / 'B.field'} and {out / 'V.field'}")
    print(f"hypothesis margin = {margin!r}")
    print(f"flux integer l = {l}")
    return 0


def cmd_forward(cfg: ExperimentConfig, b_path: str, v_path: str) -> int:
    try:
        B = load_field(b_path)
        V = load_field(v_path)
    except (OSError, ValueError) as err:
        print(f"load stage failed: {err}", file=sys.stderr)
        return 2
    try:
        inv = compute_invariant_set(B, V, cfg.max_dir, cfg.K, cfg.N)
    except HypothesisError as err:
        print(f"forward stage rejected the field: margin = {err.margin!r}", file=sys.stderr)
        return 2
    except ValueError as err:
        print(f"forward stage rejected the field: {err}", file=sys.stderr)
        return 2
    out = _outdir(cfg)
    save_invariants(inv, out / "invariants.txt")
    for delta in inv.directions:
        print(f"delta ({delta.a},{delta.b}): tail max|F_k| for k > K/2 is "
              f"{tail_magnitude(inv.F[delta]):.6e}")
    print(f"wrote {out / 'invariants.txt'}")
    return 0


def cmd_invert(cfg: ExperimentConfig, inv_path: str) -> int:
    try:
        inv = load_invariants(inv_path)
    except (OSError, ValueError) as err:
        print(f"load stage failed: {err}", file=sys.stderr)
        return 2
    M = max(cfg.M, 4 * inv.K)
    try:
        B_rec, V_rec, _ = invert_invariants(inv, M)
    except MonotonicityError as err:
        print(f"inversion stage failed: {err}", file=sys.stderr)
        return 3
    out = _outdir(cfg)
    save_field(B_rec, out / "B_rec.field")
    save_field(V_rec, out / "V_rec.field")
    print(f"wrote {out / 'B_rec.field'} and {out / 'V_rec.field'}")
    print(f"reconstructed from {len(inv.directions)} directions at K = {inv.K}")
    return 0


def _write_csv(path: Path, header: str, rows) -> None:
    lines = [header + "\n"]
    for row in rows:
        lines.append(",".join(repr(x) if isinstance(x, float) else str(x) for x in row) + "\n")
    path.write_text("".join(lines))


def _heat_grid(field) -> np.ndarray:
    s = np.arange(HEATMAP_GRID) / HEATMAP_GRID
    pts = field.lattice.point(s[:, None], s[None, :])
    return eval_field(field, pts)


def cmd_roundtrip(cfg: ExperimentConfig) -> int:
    B, V = _synth_pair(cfg)
    try:
        inv = compute_invariant_set(B, V, cfg.max_dir, cfg.K, cfg.N)
    except HypothesisError as err:
        print(f"forward stage rejected the field: margin = {err.margin!r}", file=sys.stderr)
        return 2
    except ValueError as err:
        print(f"forward stage rejected the field: {err}", file=sys.stderr)
        return 2

    sweep = sorted({k for k in SWEEP_KS if k < cfg.K} | {cfg.K})
    sweep_rows = []
    final = None
    for K in sweep:
        invk = truncate_invariants(inv, K)
        try:
            B_rec, V_rec, maps = invert_invariants(invk, cfg.M)
        except MonotonicityError as err:
            print(f"inversion at K = {K} failed: {err}", file=sys.stderr)
            sweep_rows.append((K, float("nan"), float("nan"), float("nan"), float("nan")))
            continue
        bl, b2 = coefficient_errors(B, B_rec)
        vl, v2 = coefficient_errors(V, V_rec)
        sweep_rows.append((K, bl, b2, vl, v2))
        if K == cfg.K:
            final = (B_rec, V_rec, maps)
    if final is None:
        print("inversion stage failed at the requested K", file=sys.stderr)
        return 3

    B_rec, V_rec, maps = final
    report = build_report(B, V, B_rec, V_rec, inv)
    out = _outdir(cfg)

    save_field(B, out / "B_true.field")
    save_field(V, out / "V_true.field")
    save_field(B_rec, out / "B_rec.field")
    save_field(V_rec, out / "V_rec.field")
    save_invariants(inv, out / "invariants.txt")
    (out / "report.txt").write_text(format_report(report))
    _write_csv(out / "per_direction_errors.csv", "delta_a,delta_b,b_err,v_err",
               report_rows(report))
    _write_csv(out / "errors_vs_k.csv", "K,b_linf,b_l2,v_linf,v_l2", sweep_rows)

    np.savetxt(out / "b_true_grid.csv", _heat_grid(B), delimiter=",", fmt="%.17e")
    np.savetxt(out / "b_rec_grid.csv", _heat_grid(B_rec), delimiter=",", fmt="%.17e")
    ys = np.arange(cfg.M) / cfg.M
    sp_table = np.column_stack([ys] + [maps[d].sprime_of_y for d in inv.directions])
    header = "y," + ",".join(f"sprime({d.a};{d.b})" for d in inv.directions)
    np.savetxt(out / "sprime.csv", sp_table, delimiter=",", fmt="%.17e",
               header=header, comments="# ")

    _emit_plots(out)
    print(f"B coefficient error: Linf {report.b_error_linf:.3e}, L2 {report.b_error_l2:.3e}")
    print(f"V coefficient error: Linf {report.v_error_linf:.3e}, L2 {report.v_error_l2:.3e}")
    print(f"wrote data files and plots under {out}")
    return 0


def _emit_plots(out: Path) -> None:
    """Render the emitted CSV tables (no computation here, only plotting)."""
    import matplotlib
    matplotlib.use("Agg", force=True)
    import matplotlib.pyplot as plt

    bt = np.loadtxt(out / "b_true_grid.csv", delimiter=",")
    br = np.loadtxt(out / "b_rec_grid.csv", delimiter=",")
    fig, axes = plt.subplots(1, 2, figsize=(9, 4))
    for ax, data, title in ((axes[0], bt, "B true"), (axes[1], br, "B reconstructed")):
        im = ax.imshow(data.T, origin="lower", extent=(0, 1, 0, 1), aspect="auto")
        ax.set_title(title)
        ax.set_xlabel("s")
        ax.set_ylabel("u")
        fig.colorbar(im, ax=ax)
    fig.tight_layout()
    fig.savefig(out / "heatmaps.png", dpi=110)
    plt.close(fig)

    sp = np.loadtxt(out / "sprime.csv", delimiter=",")
    fig, ax = plt.subplots(figsize=(7, 4))
    for col in range(1, sp.shape[1]):
        ax.plot(sp[:, 0], sp[:, col], lw=0.8)
    ax.set_xlabel("y")
    ax.set_ylabel("s'(y)")
    ax.set_title("pushforward densities per direction")
    fig.tight_layout()
    fig.savefig(out / "sprime.png", dpi=110)
    plt.close(fig)

    ek = np.loadtxt(out / "errors_vs_k.csv", delimiter=",", skiprows=1)
    ek = np.atleast_2d(ek)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogy(ek[:, 0], ek[:, 1], "o-", label="B Linf")
    ax.semilogy(ek[:, 0], ek[:, 3], "s-", label="V Linf")
    ax.set_xlabel("K")
    ax.set_ylabel("relative coefficient error")
    ax.set_title("reconstruction error vs harmonic cutoff")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out / "error_vs_k.png", dpi=110)
    plt.close(fig)


def cmd_check(cfg: ExperimentConfig) -> int:
    lat = cfg.lattice()
    ok, witness = is_generic(lat, cfg.radius)
    if ok:
        print(f"generic (radius {cfg.radius!r}): all lengths distinct up to sign")
    else:
        print(f"non-generic (radius {cfg.radius!r}): witness pair {witness[0]} and {witness[1]}")
    b0 = cfg.b0_value()
    l = flux_integer(lat, b0)
    if l is None:
        print(f"b0 = {b0!r}: flux is non-quantized")
    else:
        print(f"b0 = {b0!r}: flux integer l = {l}")
    phase = commutator_phase(lat, b0)
    print(f"|commutator phase| = {abs(phase)!r}")
    if l is not None and l.denominator > 1 and l.numerator == 1:
        q = l.denominator
        sub = unit_flux_sublattice(lat, q)
        l0 = flux_integer(sub, b0)
        print(f"l = 1/{q}: fields are periodic for the sublattice "
              f"{{{q}*e1, e2}}, whose flux integer is {l0}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="magtorus",
        description="forward and inverse spectral computations for a magnetic "
                    "Schrodinger operator on a flat 2-D torus",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("-c", "--config", help="config file (documented schema)")
        p.add_argument("--k", type=int, help="override K, harmonics per direction")
        p.add_argument("--seed", type=int, help="override the RNG seed")
        p.add_argument("--out", help="override the output directory")
        p.add_argument("--max-dir", dest="max_dir", type=int,
                       help="override the direction sup-norm bound")
        p.add_argument("--grid", type=int, help="override N, forward quadrature points")

    common(sub.add_parser("synth", help="write a random admissible field pair"))
    p = sub.add_parser("forward", help="compute invariants of saved fields")
    common(p)
    p.add_argument("b_file", help="B field file")
    p.add_argument("v_file", help="V field file")
    p = sub.add_parser("invert", help="reconstruct fields from an invariant file")
    common(p)
    p.add_argument("inv_file", help="invariant file")
    common(sub.add_parser("roundtrip", help="synth + forward + invert with sweep and plots"))
    common(sub.add_parser("check", help="lattice diagnostics"))
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else ExperimentConfig()
        cfg = _apply_overrides(cfg, args)
        cfg.validate()
    except (OSError, ValueError) as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    if args.command == "synth":
        return cmd_synth(cfg)
    if args.command == "forward":
        return cmd_forward(cfg, args.b_file, args.v_file)
    if args.command == "invert":
        return cmd_invert(cfg, args.inv_file)
    if args.command == "roundtrip":
        return cmd_roundtrip(cfg)
    if args.command == "check":
        return cmd_check(cfg)
    raise AssertionError(f"unhandled command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
