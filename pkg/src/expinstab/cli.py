"""Command-line front end: config parsing, deterministic CSV output, and the
pack / basis / net / forward / scatter / instability subcommands.

Configs are plain key=value text ('#' comments); every key has a default, so
an empty file is a valid all-defaults config.  All output files use LF line
endings and 17-significant-digit floats, so identical (config, seed) runs are
byte-identical.  Exit codes: 0 success, 2 config error, 3 solver failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from expinstab import packing, shapes, spectral
from expinstab.conductivity import (
    ElectrodeConfig,
    InclusionProblem,
    SolverError,
    delta_dtn_weighted,
    diagonal_decay_fit,
    dtn_numeric,
    resistance_matrix,
)
from expinstab.engine import EngineConfig, InstabilityReport, run_instability
from expinstab.opnet import NetParams, net_size_log_bound
from expinstab.scattering import ObstacleProblem, ScatteringError, farfield_numeric
from expinstab.shapes import load_shape


class ConfigError(ValueError):
    """Invalid configuration input."""


@dataclass(frozen=True)
class ExperimentConfig:
    problem: str = "dtn"
    kind: str = shapes.RADIAL_SUBGRAPH
    m: int = 1
    beta: float = 1.0
    eps_list: tuple[float, ...] = (0.12, 0.08, 0.05, 0.03)
    a: float = 2.0
    a_list: tuple[float, ...] = (1.0, 4.0)
    n_max: int = 32
    quad_nodes: int = 512
    scatter_n_max: int = 12
    scatter_quad: int = 192
    directions: int = 48
    budget: int = 200
    samples: int = 50
    seed: int = 0
    base_radius: float = 0.5
    grid_size: int = 2048
    electrodes: int = 8
    electrode_coverage: float = 0.5
    electrode_z: float = 0.1
    delta: tuple[float, ...] = (0.01,)
    c2: float = 1.0
    alpha2: float = 0.5
    p: float = 1.0
    domain: str = spectral.FULL_CIRCLE
    r0: float = 0.8
    threads: int = 1
    out: str = ""


_FLOAT_TUPLES = {"eps_list", "a_list", "delta"}
_STR_KEYS = {"problem", "kind", "domain", "out"}


def _parse_value(key: str, raw: str, template: ExperimentConfig):
    if key in _FLOAT_TUPLES:
        return tuple(float(v) for v in raw.split(",") if v.strip())
    current = getattr(template, key)
    if key in _STR_KEYS:
        return raw
    if isinstance(current, int):
        return int(raw)
    return float(raw)


def _validate(cfg: ExperimentConfig, line_for_key: dict[str, int] | None = None) -> None:
    def fail(key: str, msg: str):
        line = (line_for_key or {}).get(key)
        where = f" (line {line})" if line else ""
        raise ConfigError(f"{key}: {msg}{where}")

    if cfg.problem not in ("dtn", "ntd", "electrodes", "farfield"):
        fail("problem", f"unknown problem {cfg.problem!r}")
    if cfg.kind not in shapes.KINDS:
        fail("kind", f"unknown shape kind {cfg.kind!r}")
    if cfg.domain not in spectral.DOMAIN_KINDS:
        fail("domain", f"unknown domain {cfg.domain!r}")
    if cfg.m < 1:
        fail("m", "smoothness order must be >= 1")
    if cfg.beta <= 0:
        fail("beta", "norm bound must be positive")
    if not cfg.eps_list or any(not 0 < e < 1 for e in cfg.eps_list):
        fail("eps_list", "eps values must lie in (0, 1)")
    if cfg.a <= 0:
        fail("a", "contrast must be positive")
    if not cfg.a_list or any(v <= 0 for v in cfg.a_list):
        fail("a_list", "wave parameters must be positive")
    if cfg.n_max < 1 or cfg.scatter_n_max < 1:
        fail("n_max", "mode counts must be >= 1")
    if cfg.quad_nodes < 32 or cfg.scatter_quad < 32 or cfg.scatter_quad % 2:
        fail("quad_nodes", "quadrature nodes must be >= 32 (scatter: even)")
    if cfg.directions < 4 or cfg.directions % 2:
        fail("directions", "direction count must be even and >= 4")
    if cfg.budget < 2:
        fail("budget", "budget must be >= 2")
    if cfg.samples < 1:
        fail("samples", "samples must be >= 1")
    if cfg.base_radius <= 0:
        fail("base_radius", "base radius must be positive")
    if cfg.grid_size < 64:
        fail("grid_size", "grid size must be >= 64")
    if cfg.electrodes < 2:
        fail("electrodes", "need at least two electrodes")
    if not 0 < cfg.electrode_coverage < 1:
        fail("electrode_coverage", "coverage must lie in (0, 1)")
    if cfg.electrode_z <= 0:
        fail("electrode_z", "impedance must be positive")
    if any(not 0 < d < 1 / math.e for d in cfg.delta):
        fail("delta", "delta values must lie in (0, 1/e)")
    if cfg.c2 <= 0 or cfg.alpha2 <= 0 or cfg.p <= 0:
        fail("c2", "class constants must be positive")
    if not 0 < cfg.r0 < 1:
        fail("r0", "r0 must lie in (0, 1)")
    if cfg.threads < 1:
        fail("threads", "threads must be >= 1")


def parse_config(text: str) -> ExperimentConfig:
    """Parse key=value lines with '#' comments; unknown keys are rejected
    with their line number; defaults fill everything else."""
    template = ExperimentConfig()
    known = {f.name for f in fields(ExperimentConfig)}
    updates: dict[str, object] = {}
    line_for_key: dict[str, int] = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw_line!r}")
        key, _, raw = line.partition("=")
        key, raw = key.strip(), raw.strip()
        if key not in known:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            updates[key] = _parse_value(key, raw, template)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {exc}") from exc
        line_for_key[key] = lineno
    cfg = replace(template, **updates)
    _validate(cfg, line_for_key)
    return cfg


def format_value(value) -> str:
    if isinstance(value, float):
        return f"{value:.17g}"
    if isinstance(value, tuple):
        return ",".join(format_value(v) for v in value)
    return str(value)


def config_text(cfg: ExperimentConfig) -> str:
    """Effective config echo; parses back to an identical config.

    The output directory is an invocation detail, not part of the experiment,
    so it is omitted (identical experiments echo identical bytes).
    """
    lines = [
        f"{f.name}={format_value(getattr(cfg, f.name))}"
        for f in fields(cfg)
        if f.name != "out"
    ]
    return "\n".join(lines) + "\n"


def write_csv(path: Path, header: list[str], rows: list[tuple]) -> None:
    """Deterministic CSV: fixed column order, 17-significant-digit floats,
    LF line endings."""
    out = [",".join(header)]
    for row in rows:
        out.append(",".join(format_value(v) for v in row))
    path.write_text("\n".join(out) + "\n", encoding="utf-8", newline="\n")


def emit_matrix_csv(path: Path, matrix: np.ndarray) -> None:
    """Matrix entries as (row, col, value) — complex values add an imag column."""
    rows = []
    is_complex = np.iscomplexobj(matrix)
    header = ["row", "col", "value", "imag"] if is_complex else ["row", "col", "value"]
    for i in range(matrix.shape[0]):
        for j in range(matrix.shape[1]):
            v = matrix[i, j]
            rows.append((i, j, float(v.real), float(v.imag)) if is_complex else (i, j, float(v)))
    write_csv(path, header, rows)


REPORT_HEADER = [
    "eps",
    "pattern_a",
    "pattern_b",
    "hausdorff",
    "resolution",
    "op_norm_diff",
    "delta_eps",
    "packing_log_count",
    "certified_log_cardinality",
    "net_log_bound",
    "counting_ok",
    "margin",
    "sample_count",
    "norm_floored",
]


def emit_report_csv(path: Path, report: InstabilityReport) -> None:
    rows = [
        tuple(getattr(r, name) for name in REPORT_HEADER)
        for r in report.records
    ]
    write_csv(path, REPORT_HEADER, rows)


def emit_report_plot_data(path: Path, report: InstabilityReport) -> None:
    """Two columns: log(1/eps) and log(-log ||dF||)."""
    rows = []
    for r in report.records:
        if 0.0 < r.op_norm_diff < 1.0:
            rows.append((math.log(1.0 / r.eps), math.log(-math.log(r.op_norm_diff))))
    write_csv(path, ["log_inv_eps", "log_neg_log_norm"], rows)


# ----------------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------------

def _out_dir(cfg: ExperimentConfig) -> Path | None:
    if not cfg.out:
        return None
    path = Path(cfg.out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _echo_config(cfg: ExperimentConfig, out: Path | None) -> None:
    text = config_text(cfg)
    if out is not None:
        (out / "config.echo").write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def _cmd_pack(cfg: ExperimentConfig) -> list[tuple]:
    cls = packing.ShapeClass(
        kind=cfg.kind, base=cfg.base_radius, m=cfg.m, beta=cfg.beta, grid_size=cfg.grid_size
    )
    eps = cfg.eps_list[0]
    family = packing.build_packing(cls, eps)
    rng = np.random.default_rng(cfg.seed)
    patterns = family.sample_patterns(rng, cfg.samples)
    built = [family.shape(p) for p in patterns]
    base = family.base_shape()
    samples = min(cfg.grid_size, 512)
    rows = []
    for idx, (pat, shape) in enumerate(zip(patterns, built)):
        to_base = shapes.hausdorff_distance(shape, base, samples=samples)
        min_pair = math.inf
        for jdx, other in enumerate(built):
            if jdx == idx:
                continue
            min_pair = min(min_pair, shapes.hausdorff_distance(shape, other, samples=samples))
        rows.append((pat, to_base, min_pair))
    return rows


def _cmd_basis(cfg: ExperimentConfig):
    spec = spectral.BasisSpec(cfg.domain, n_max=cfg.n_max)
    elements = spectral.enumerate_basis(spec)
    degree_rows = [(e.index, e.degree, e.parity, e.multiplicity) for e in elements]
    decay_rows = [(e.degree, spectral.interior_decay(e, cfg.r0)) for e in elements]
    return degree_rows, decay_rows


def _cmd_net(cfg: ExperimentConfig) -> list[tuple]:
    rows = []
    for delta in cfg.delta:
        params = NetParams.for_delta(delta, cfg.c2, cfg.alpha2, cfg.p)
        bound = net_size_log_bound(delta, cfg.c2, cfg.alpha2, cfg.p)
        rows.append(
            (
                delta,
                params.n_tilde,
                params.delta_prime,
                bound.psi_count,
                bound.pair_count,
                bound.log_bound,
            )
        )
    return rows


def _run_forward(cfg: ExperimentConfig, shape_file: str):
    shape = load_shape(shape_file)
    prob = InclusionProblem(shape, cfg.a, cfg.n_max, cfg.quad_nodes)
    dtn = dtn_numeric(prob)
    weighted = delta_dtn_weighted(prob)
    alpha_hat, c_hat, r2 = diagonal_decay_fit(weighted)
    fit_rows = [("alpha_hat", alpha_hat), ("c_hat", c_hat), ("r_squared", r2)]
    ecfg = ElectrodeConfig.equispaced(cfg.electrodes, cfg.electrode_coverage, cfg.electrode_z)
    r_mat = resistance_matrix(prob, ecfg, dtn_matrix=dtn)
    return dtn, fit_rows, r_mat


def _run_scatter(cfg: ExperimentConfig, shape_file: str):
    from expinstab.scattering import farfield_operator

    shape = load_shape(shape_file)
    prob = ObstacleProblem(
        shape, cfg.a_list, cfg.scatter_n_max, cfg.scatter_quad, cfg.directions
    )
    fields = farfield_numeric(prob)
    mag_rows, meta_rows = [], []
    for a in cfg.a_list:
        mat = fields[a]
        for i in range(mat.entries.shape[0]):
            for j in range(mat.entries.shape[1]):
                mag_rows.append((a, i, j, abs(mat.entries[i, j])))
        op = farfield_operator(mat)
        meta_rows.append((a, mat.reciprocity_residual, op.c2, op.alpha2))
    return mag_rows, meta_rows


def _cmd_instability(cfg: ExperimentConfig) -> InstabilityReport:
    engine_cfg = EngineConfig(
        problem=cfg.problem,
        m=cfg.m,
        beta=cfg.beta,
        contrast=cfg.a,
        wave_params=cfg.a_list,
        n_max=cfg.n_max,
        quad_nodes=cfg.quad_nodes,
        scatter_n_max=cfg.scatter_n_max,
        scatter_quad=cfg.scatter_quad,
        direction_count=cfg.directions,
        electrode_count=cfg.electrodes,
        electrode_coverage=cfg.electrode_coverage,
        electrode_impedance=cfg.electrode_z,
        grid_size=cfg.grid_size,
    )
    return run_instability(cfg.problem, cfg.eps_list, cfg.budget, cfg.seed, engine_cfg)


def _load_cli_config(args: argparse.Namespace) -> ExperimentConfig:
    if args.config:
        cfg = parse_config(Path(args.config).read_text(encoding="utf-8"))
    else:
        cfg = ExperimentConfig()
    overrides: dict[str, object] = {}
    for key in (
        "problem",
        "kind",
        "m",
        "beta",
        "a",
        "n_max",
        "budget",
        "samples",
        "seed",
        "out",
        "threads",
        "domain",
        "r0",
        "c2",
        "alpha2",
        "p",
        "quad_nodes",
    ):
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    for key in ("eps_list", "a_list", "delta"):
        raw = getattr(args, key, None)
        if raw is not None:
            overrides[key] = tuple(float(v) for v in raw.split(","))
    if overrides:
        cfg = replace(cfg, **overrides)
    _validate(cfg)
    return cfg


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="expinstab",
        description="Exponential-instability experiments for 2D elliptic inverse problems",
    )
    parser.add_argument("--config", help="key=value config file")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--threads", type=int, default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    p_pack = sub.add_parser("pack", help="build a packing family and sample it")
    p_pack.add_argument("--kind", default=None)
    p_pack.add_argument("--m", type=int, default=None)
    p_pack.add_argument("--beta", type=float, default=None)
    p_pack.add_argument("--eps", dest="eps_list", default=None)
    p_pack.add_argument("--samples", type=int, default=None)

    p_basis = sub.add_parser("basis", help="degree tables and decay curves")
    p_basis.add_argument("--domain", default=None)
    p_basis.add_argument("--n-max", dest="n_max", type=int, default=None)
    p_basis.add_argument("--r0", type=float, default=None)

    p_net = sub.add_parser("net", help="net parameters and size bounds")
    p_net.add_argument("--delta", default=None)
    p_net.add_argument("--C2", dest="c2", type=float, default=None)
    p_net.add_argument("--alpha2", type=float, default=None)
    p_net.add_argument("--p", type=float, default=None)

    p_fwd = sub.add_parser("forward", help="DtN and electrode forward maps")
    p_fwd.add_argument("--shape-file", required=True)
    p_fwd.add_argument("--a", type=float, default=None)
    p_fwd.add_argument("--nmax", dest="n_max", type=int, default=None)
    p_fwd.add_argument("--electrodes", type=int, default=None)

    p_sc = sub.add_parser("scatter", help="far-field matrices")
    p_sc.add_argument("--shape-file", required=True)
    p_sc.add_argument("--a-list", dest="a_list", default=None)
    p_sc.add_argument("--nmax", dest="scatter_n_max_flag", type=int, default=None)
    p_sc.add_argument("--quad", dest="scatter_quad_flag", type=int, default=None)

    p_inst = sub.add_parser("instability", help="end-to-end instability run")
    p_inst.add_argument("--problem", default=None)
    p_inst.add_argument("--eps-list", dest="eps_list", default=None)
    p_inst.add_argument("--budget", dest="budget", type=int, default=None)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_cli_config(args)
        if getattr(args, "electrodes", None) is not None:
            cfg = replace(cfg, electrodes=args.electrodes)
        if getattr(args, "scatter_n_max_flag", None) is not None:
            cfg = replace(cfg, scatter_n_max=args.scatter_n_max_flag)
        if getattr(args, "scatter_quad_flag", None) is not None:
            cfg = replace(cfg, scatter_quad=args.scatter_quad_flag)
        _validate(cfg)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    out = _out_dir(cfg)
    try:
        if args.command == "pack":
            rows = _cmd_pack(cfg)
            _write_or_print(out, "pack.csv", ["pattern_id", "hausdorff_to_base", "min_pairwise_sampled"], rows)
        elif args.command == "basis":
            degree_rows, decay_rows = _cmd_basis(cfg)
            _write_or_print(out, "basis_degrees.csv", ["index", "degree", "parity", "multiplicity"], degree_rows)
            _write_or_print(out, "basis_decay.csv", ["degree", "interior_decay"], decay_rows)
        elif args.command == "net":
            rows = _cmd_net(cfg)
            _write_or_print(
                out, "net.csv",
                ["delta", "n_tilde", "delta_prime", "psi_count", "pair_count", "log_bound"],
                rows,
            )
        elif args.command == "forward":
            dtn, fit_rows, r_mat = _run_forward(cfg, args.shape_file)
            if out is None:
                raise ConfigError("forward requires --out")
            emit_matrix_csv(out / "dtn.csv", dtn)
            write_csv(out / "decay_fit.csv", ["name", "value"], fit_rows)
            emit_matrix_csv(out / "resistance.csv", r_mat)
        elif args.command == "scatter":
            mag_rows, meta_rows = _run_scatter(cfg, args.shape_file)
            _write_or_print(out, "farfield_magnitudes.csv", ["a", "row", "col", "abs_value"], mag_rows)
            _write_or_print(
                out, "reciprocity.csv", ["a", "residual", "c2_hat", "alpha2_hat"], meta_rows
            )
        elif args.command == "instability":
            report = _cmd_instability(cfg)
            if out is None:
                raise ConfigError("instability requires --out")
            emit_report_csv(out / "report.csv", report)
            emit_report_plot_data(out / "plot_data.csv", report)
            write_csv(
                out / "summary.csv",
                ["name", "value"],
                [
                    ("problem", report.problem),
                    ("witness_pairs", "empirical_minimum_over_budget"),
                    ("q_hat", report.q_hat),
                    ("r_squared", report.r_squared),
                    ("theoretical_exponent", report.theoretical_exponent),
                    ("class_c2", report.class_c2),
                    ("class_alpha2", report.class_alpha2),
                    ("eps0", report.eps0),
                    ("seed", report.seed),
                ],
            )
        _echo_config(cfg, out)
    except (ConfigError, OSError, shapes.ShapeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (SolverError, ScatteringError, np.linalg.LinAlgError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 3
    return 0


def _write_or_print(out: Path | None, name: str, header: list[str], rows: list[tuple]) -> None:
    if out is not None:
        write_csv(out / name, header, rows)
    else:
        sys.stdout.write(",".join(header) + "\n")
        for row in rows:
            sys.stdout.write(",".join(format_value(v) for v in row) + "\n")


if __name__ == "__main__":
    sys.exit(main())
