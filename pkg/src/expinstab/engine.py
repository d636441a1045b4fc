"""End-to-end instability experiments: packing families composed with forward
maps, witness-pair search, and instability-exponent fits.

The pigeonhole argument is existential over exponentially many shapes; at
desk scale the engine draws a random subsample of patterns and reports the
best pair found, labeled as an empirical minimum over the budget, never as
the theoretical optimum.  Every recorded pair is admissible by construction:
distinct patterns of one packing family are >= eps apart.

Counting bookkeeping: the packing side uses the certified lower-bound
formula; the net side uses the counted net-size bound at delta(eps) with
class constants fitted from the sampled forward maps.  For the electrode
problem the class constants are fitted on the Neumann-to-Dirichlet
differences, the operator family the resistance bound factors through.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from expinstab import shapes
from expinstab.conductivity import (
    ElectrodeConfig,
    InclusionProblem,
    delta_dtn_weighted,
    dtn_numeric,
    fit_envelope,
    fourier_degrees,
    ntd_from_dtn,
    resistance_matrix,
)
from expinstab.opnet import counting_check, delta_of_epsilon, net_size_log_bound
from expinstab.packing import ShapeClass, build_packing, packing_lower_bound
from expinstab.scattering import ObstacleProblem, circle_degrees, farfield_numeric
from expinstab.shapes import Shape, hausdorff_distance, hausdorff_resolution

PROBLEMS = ("dtn", "ntd", "electrodes", "farfield")

NORM_FLOOR = 1e-300


@dataclass(frozen=True)
class EngineConfig:
    """Physics and solver knobs shared by all problems."""

    problem: str = "dtn"
    m: int = 1
    beta: float = 1.0
    contrast: float = 2.0
    wave_params: tuple[float, ...] = (1.0, 4.0)
    n_max: int = 32
    quad_nodes: int = 512
    scatter_n_max: int = 12
    scatter_quad: int = 192
    direction_count: int = 48
    electrode_count: int = 8
    electrode_coverage: float = 0.5
    electrode_impedance: float = 0.1
    grid_size: int = 2048
    distance_samples: int = 512

    def __post_init__(self):
        if self.problem not in PROBLEMS:
            raise ValueError(f"unknown problem {self.problem!r}")

    def shape_class(self) -> ShapeClass:
        base = 1.0 if self.problem == "farfield" else 0.5
        return ShapeClass(
            kind=shapes.RADIAL_SUBGRAPH,
            base=base,
            m=self.m,
            beta=self.beta,
            grid_size=self.grid_size,
        )


@dataclass(frozen=True)
class _ForwardResult:
    measurement: object
    class_entries: np.ndarray
    class_degrees: np.ndarray


def _make_forward(cfg: EngineConfig, electrode_cfg: ElectrodeConfig | None):
    if cfg.problem in ("dtn", "ntd", "electrodes"):
        mean_zero_degrees = fourier_degrees(cfg.n_max)[1:]
        ecfg = electrode_cfg or ElectrodeConfig.equispaced(
            cfg.electrode_count, cfg.electrode_coverage, cfg.electrode_impedance
        )
        ntd_base = np.diag(1.0 / mean_zero_degrees)

        def forward(shape: Shape) -> _ForwardResult:
            prob = InclusionProblem(shape, cfg.contrast, cfg.n_max, cfg.quad_nodes)
            if cfg.problem == "dtn":
                op = delta_dtn_weighted(prob)
                return _ForwardResult(op.entries, op.entries, op.degrees)
            dtn = dtn_numeric(prob)
            ntd = ntd_from_dtn(dtn)
            if cfg.problem == "ntd":
                return _ForwardResult(ntd, ntd - ntd_base, mean_zero_degrees)
            r_mat = resistance_matrix(prob, ecfg, dtn_matrix=dtn)
            return _ForwardResult(r_mat, ntd - ntd_base, mean_zero_degrees)

        def dist(f1: _ForwardResult, f2: _ForwardResult) -> float:
            return float(np.linalg.norm(f1.measurement - f2.measurement, 2))

        return forward, dist

    degrees = circle_degrees(cfg.scatter_n_max)

    def forward(shape: Shape) -> _ForwardResult:
        prob = ObstacleProblem(
            shape, cfg.wave_params, cfg.scatter_n_max, cfg.scatter_quad, cfg.direction_count
        )
        fields = farfield_numeric(prob)
        stacked = np.stack([fields[a].entries for a in cfg.wave_params])
        return _ForwardResult(stacked, np.abs(stacked).max(axis=0), degrees)

    def dist(f1: _ForwardResult, f2: _ForwardResult) -> float:
        # sup over the wave-parameter set of the L^2 far-field difference
        diffs = f1.measurement - f2.measurement
        return float(max(np.linalg.norm(d.ravel()) for d in diffs))

    return forward, dist


@dataclass(frozen=True)
class WitnessRecord:
    """One per-eps result: the best pair found within the sampling budget."""

    eps: float
    pattern_a: int
    pattern_b: int
    hausdorff: float
    resolution: float
    op_norm_diff: float
    delta_eps: float
    packing_log_count: float
    certified_log_cardinality: float
    net_log_bound: float
    counting_ok: bool
    margin: float
    sample_count: int
    norm_floored: bool


@dataclass(frozen=True)
class InstabilityReport:
    problem: str
    m: int
    beta: float
    seed: int
    budget: int
    records: tuple[WitnessRecord, ...]
    q_hat: float = math.nan
    r_squared: float = math.nan
    theoretical_exponent: float = math.nan
    class_c2: float = math.nan
    class_alpha2: float = math.nan
    eps0: float = math.nan


def _min_norm_pair(results: list[_ForwardResult], dist) -> tuple[int, int, float]:
    best = (0, 1, math.inf)
    for i in range(len(results)):
        for j in range(i + 1, len(results)):
            d = dist(results[i], results[j])
            if d < best[2]:
                best = (i, j, d)
    return best


def run_instability(
    problem: str,
    eps_list,
    sample_budget: int,
    seed: int,
    config: EngineConfig | None = None,
    electrode_cfg: ElectrodeConfig | None = None,
) -> InstabilityReport:
    """For each eps, draw <= budget patterns of the packing family, compute
    the forward maps, and record the pair minimizing the measurement-space
    distance.  Deterministic: identical (arguments, seed) -> identical report.
    """
    if sample_budget < 2:
        raise ValueError("sample budget must be >= 2")
    cfg = config or EngineConfig(problem=problem)
    if cfg.problem != problem:
        cfg = replace(cfg, problem=problem)
    forward, dist = _make_forward(cfg, electrode_cfg)
    cls = cfg.shape_class()
    records = []
    class_c2, class_alpha2 = 0.0, math.inf
    eps0 = math.nan
    for index, eps in enumerate(eps_list):
        family = build_packing(cls, float(eps))
        eps0 = family.eps0
        rng = np.random.default_rng([seed, index])
        patterns = family.sample_patterns(rng, sample_budget)
        built = [family.shape(p) for p in patterns]
        results = [forward(s) for s in built]
        i, j, best = _min_norm_pair(results, dist)
        floored = best < NORM_FLOOR
        best = max(best, NORM_FLOOR)
        d_h = hausdorff_distance(built[i], built[j], samples=cfg.distance_samples)
        res = hausdorff_resolution(built[i], built[j], samples=cfg.distance_samples)
        c2 = 0.0
        alpha2 = math.inf
        for r in results:
            c, al = fit_envelope(np.abs(r.class_entries), r.class_degrees)
            c2, alpha2 = max(c2, c), min(alpha2, al)
        class_c2, class_alpha2 = max(class_c2, c2), min(class_alpha2, alpha2)
        alpha1 = 1.0 / cfg.m  # (N-1)/m at N = 2
        d_eps = delta_of_epsilon(float(eps), alpha1, 1.0)
        packing_log = packing_lower_bound(float(eps), cfg.m, cfg.beta, 2, family.eps0)
        net_log = net_size_log_bound(d_eps, c2, alpha2, 1.0).log_bound
        ok, margin = counting_check(float(eps), packing_log, net_log)
        records.append(
            WitnessRecord(
                eps=float(eps),
                pattern_a=patterns[i],
                pattern_b=patterns[j],
                hausdorff=d_h,
                resolution=res,
                op_norm_diff=best,
                delta_eps=d_eps,
                packing_log_count=packing_log,
                certified_log_cardinality=family.certified_log_cardinality,
                net_log_bound=net_log,
                counting_ok=ok,
                margin=margin,
                sample_count=len(patterns),
                norm_floored=floored,
            )
        )
    report = InstabilityReport(
        problem=problem,
        m=cfg.m,
        beta=cfg.beta,
        seed=seed,
        budget=sample_budget,
        records=tuple(records),
        theoretical_exponent=1.0 / (4.0 * cfg.m),
        class_c2=class_c2,
        class_alpha2=class_alpha2,
        eps0=eps0,
    )
    q_hat, r2 = fit_instability_exponent(report)
    return replace(report, q_hat=q_hat, r_squared=r2)


def fit_instability_exponent(report: InstabilityReport) -> tuple[float, float]:
    """Regression of log(-log ||dF||) against log(1/eps): the slope estimates
    the instability exponent.  The theoretical target 1/(4m) at N = 2 is
    carried in the report but not asserted (sampled minima need not attain
    the pigeonhole bound); norms at or above 1 are excluded as
    non-exponential."""
    eps = np.array([r.eps for r in report.records])
    norms = np.array([max(r.op_norm_diff, NORM_FLOOR) for r in report.records])
    if eps.size < 2:
        return math.nan, math.nan
    usable = norms < 1.0
    if usable.sum() < 2:
        return math.nan, 0.0
    x = np.log(1.0 / eps[usable])
    y = np.log(-np.log(norms[usable]))
    slope, intercept = np.polyfit(x, y, 1)
    pred = slope * x + intercept
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(slope), r2
