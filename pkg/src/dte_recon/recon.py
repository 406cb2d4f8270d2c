"""Reconciliation efficiency and sweep orchestration.

The maximum efficiency retained after quantizing one side to ``l`` bit
planes and correcting at capacity is the plane-MI sum over the channel
mutual information:

    beta_dr = sum_i I(plane_i(x); y) / I(x; y)
    beta_rr = sum_i I(plane_i(y); x) / I(x; y)

with I(x; y) taken as the analytic Gaussian value 0.5 log2(1 + SNR).
Because every plane bit is Bernoulli(1/2), the conditional entropy of the
full expansion given the other side equals ``l - sum_i mi_i`` exactly; that
quantity is the minimum side information the quantizing party must reveal.
"""

from __future__ import annotations

import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .channel import Detection, RawKeyPair, UnreachableSnrError, \
    params_for_target_snr, snr
from .estimators import Direction, MiEstimatorConfig, SubChannelReport, \
    marginal_dists, mi_gaussian_analytic, subchannel_report
from .transform import BitMatrix, DteConfig, dte_sequence

__all__ = [
    "EfficiencyEstimate",
    "EfficiencyPoint",
    "EfficiencySweep",
    "MonteCarloSettings",
    "ReconFrames",
    "max_efficiency",
    "conditional_entropy_identity",
    "secret_key_rate",
    "run_sweep",
    "dte_reconcile_frames",
    "sweep_to_csv",
    "sweep_from_csv",
    "sweep_to_json",
    "SWEEP_CSV_COLUMNS",
]


@dataclass(frozen=True)
class EfficiencyEstimate:
    beta_dr: float
    beta_dr_se: float
    beta_rr: float
    beta_rr_se: float


def max_efficiency(reports: list[SubChannelReport], mi_xy: float) -> EfficiencyEstimate:
    """Best-case efficiencies for both directions from per-plane reports.

    Standard errors are propagated as the quadrature sum of the per-plane
    standard errors, scaled by the channel mutual information.
    """
    if not reports:
        raise ValueError("reports must be nonempty")
    if not (np.isfinite(mi_xy) and mi_xy > 0):
        raise ValueError(f"mi_xy must be > 0, got {mi_xy}")
    sum_dr = sum(r.mi_dr for r in reports)
    sum_rr = sum(r.mi_rr for r in reports)
    se_dr = math.sqrt(sum(r.mi_dr_se ** 2 for r in reports))
    se_rr = math.sqrt(sum(r.mi_rr_se ** 2 for r in reports))
    return EfficiencyEstimate(beta_dr=sum_dr / mi_xy, beta_dr_se=se_dr / mi_xy,
                              beta_rr=sum_rr / mi_xy, beta_rr_se=se_rr / mi_xy)


def conditional_entropy_identity(reports: list[SubChannelReport],
                                 direction: Direction) -> float:
    """Conditional entropy of the full expansion given the other side, in bits.

    Equals ``l - sum_i mi_i`` because the planes are independent
    Bernoulli(1/2); this is the minimum side-information amount for the
    chosen direction.
    """
    if not reports:
        raise ValueError("reports must be nonempty")
    return len(reports) - sum(r.mi(direction) for r in reports)


def secret_key_rate(beta: float, mi_xy: float, holevo_bound: float) -> float:
    """Secret rate per state, ``beta * I(x;y) - chi``, in bits.

    The eavesdropper bound ``chi`` is not computed here; it must be supplied
    from an external security analysis.  The result may be negative when the
    channel cannot support a positive rate at the given efficiency.
    """
    if not (np.isfinite(mi_xy) and mi_xy > 0):
        raise ValueError(f"mi_xy must be > 0, got {mi_xy}")
    if not (0.0 <= beta):
        raise ValueError(f"beta must be >= 0, got {beta}")
    if not (np.isfinite(holevo_bound) and holevo_bound >= 0):
        raise ValueError(f"holevo_bound must be >= 0, got {holevo_bound}")
    return beta * mi_xy - holevo_bound


@dataclass(frozen=True)
class MonteCarloSettings:
    n: int = 10_000
    repeats: int = 50
    seed: int = 7

    def __post_init__(self):
        if self.n < 100:
            raise ValueError(f"n must be >= 100, got {self.n}")
        if self.repeats < 1:
            raise ValueError(f"repeats must be >= 1, got {self.repeats}")


@dataclass(frozen=True)
class EfficiencyPoint:
    snr_db: float
    detection: Detection
    depth: int
    beta_dr: float
    beta_dr_se: float
    beta_rr: float
    beta_rr_se: float
    mi_sum_dr: float
    mi_sum_rr: float
    mi_xy: float
    reports: tuple[SubChannelReport, ...]


@dataclass(frozen=True)
class EfficiencySweep:
    """Efficiency estimates over an SNR grid, plus records of skipped points."""

    points: tuple[EfficiencyPoint, ...]
    grid: tuple[float, ...]
    depths: tuple[int, ...]
    detections: tuple[Detection, ...]
    mod_variance: float
    excess_noise: float
    mc: MonteCarloSettings
    warnings: tuple[str, ...] = field(default_factory=tuple)


def _point_seed(master: int, det_index: int, grid_index: int) -> int:
    ss = np.random.SeedSequence((int(master), det_index, grid_index))
    return int(ss.generate_state(1, np.uint64)[0])


def _sweep_point(detection: Detection, det_idx: int, grid_idx: int,
                 target_db: float, depths: tuple[int, ...], mod_variance: float,
                 excess_noise: float, mc: MonteCarloSettings,
                 est_cfg: MiEstimatorConfig):
    params = params_for_target_snr(target_db, mod_variance, excess_noise, detection)
    reports = subchannel_report(params, DteConfig(max(depths)), mc.n, mc.repeats,
                                _point_seed(mc.seed, det_idx, grid_idx), est_cfg)
    mi_xy = mi_gaussian_analytic(snr(params))
    points = []
    for depth in depths:
        head = reports[:depth]
        eff = max_efficiency(head, mi_xy)
        points.append(EfficiencyPoint(
            snr_db=target_db, detection=detection, depth=depth,
            beta_dr=eff.beta_dr, beta_dr_se=eff.beta_dr_se,
            beta_rr=eff.beta_rr, beta_rr_se=eff.beta_rr_se,
            mi_sum_dr=sum(r.mi_dr for r in head),
            mi_sum_rr=sum(r.mi_rr for r in head),
            mi_xy=mi_xy, reports=tuple(head)))
    return points


def run_sweep(grid, depths, detections, mc: MonteCarloSettings,
              mod_variance: float, excess_noise: float,
              est_cfg: MiEstimatorConfig | None = None,
              threads: int = 1) -> EfficiencySweep:
    """Estimate efficiencies over an SNR(dB) grid for each depth and detection.

    The transmittance is solved per grid point with the modulation variance
    and excess noise held fixed.  Points whose SNR would need transmittance
    above 1 are skipped and recorded as warnings.  Expansion bits are prefix
    stable, so all depths at one grid point share a single simulation at the
    maximum depth.

    Each (detection, grid) point derives its own seed from the master seed,
    so results are deterministic and independent of ``threads``.
    """
    grid = tuple(float(g) for g in grid)
    depths = tuple(sorted(int(d) for d in depths))
    detections = tuple(detections)
    if not grid:
        raise ValueError("grid must be nonempty")
    if any(grid[i] >= grid[i + 1] for i in range(len(grid) - 1)):
        raise ValueError("grid must be strictly increasing")
    if not depths or not detections:
        raise ValueError("depths and detections must be nonempty")
    est_cfg = est_cfg or MiEstimatorConfig()

    tasks = []
    warnings = []
    for det_idx, det in enumerate(detections):
        for grid_idx, target in enumerate(grid):
            try:
                params_for_target_snr(target, mod_variance, excess_noise, det)
            except UnreachableSnrError as exc:
                warnings.append(str(exc))
                continue
            tasks.append((det, det_idx, grid_idx, target))

    def run(task):
        det, det_idx, grid_idx, target = task
        return _sweep_point(det, det_idx, grid_idx, target, depths,
                            mod_variance, excess_noise, mc, est_cfg)

    if threads > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, tasks))
    else:
        results = [run(t) for t in tasks]

    points = [pt for group in results for pt in group]
    points.sort(key=lambda p: (p.detection.value, p.snr_db, p.depth))
    return EfficiencySweep(points=tuple(points), grid=grid, depths=depths,
                           detections=detections, mod_variance=mod_variance,
                           excess_noise=excess_noise, mc=mc,
                           warnings=tuple(warnings))


@dataclass(frozen=True)
class ReconFrames:
    """Quantized frames for one reconciliation direction, with diagnostics.

    ``bits`` is the quantizing party's matrix (x for direct, y for reverse);
    ``continuous`` the other party's raw values.  ``reference_bits`` holds the
    other party's expansion and ``mismatch`` the per-plane disagreement mask;
    both exist for diagnostics only, since no error-correcting decoder runs
    here.
    """

    direction: Direction
    bits: BitMatrix
    continuous: np.ndarray
    reference_bits: BitMatrix
    mismatch: np.ndarray

    def mismatch_rate(self, level: int) -> float:
        return float(np.mean(self.mismatch[level - 1]))


def dte_reconcile_frames(pair: RawKeyPair, cfg: DteConfig, direction: Direction,
                         *, x_dist=None, y_dist=None) -> ReconFrames:
    """Quantize one side of a raw-key pair and report per-plane disagreements."""
    if x_dist is None or y_dist is None:
        dx, dy = marginal_dists(pair.params)
        x_dist = x_dist or dx
        y_dist = y_dist or dy
    bx = dte_sequence(pair.x, x_dist, cfg)
    by = dte_sequence(pair.y, y_dist, cfg)
    if direction is Direction.DIRECT:
        bits, cont, ref = bx, pair.y, by
    else:
        bits, cont, ref = by, pair.x, bx
    return ReconFrames(direction=direction, bits=bits, continuous=cont,
                       reference_bits=ref, mismatch=bits.bits != ref.bits)


SWEEP_CSV_COLUMNS = ("snr_db", "detection", "depth", "beta_dr", "beta_dr_se",
                     "beta_rr", "beta_rr_se", "mi_xy")


def _fmt(v: float) -> str:
    if not np.isfinite(v):
        raise ValueError("refusing to serialize a non-finite value")
    return repr(float(v))


def sweep_to_csv(sweep: EfficiencySweep) -> str:
    buf = io.StringIO()
    buf.write(",".join(SWEEP_CSV_COLUMNS) + "\n")
    for p in sweep.points:
        buf.write(",".join([_fmt(p.snr_db), p.detection.value, str(p.depth),
                            _fmt(p.beta_dr), _fmt(p.beta_dr_se),
                            _fmt(p.beta_rr), _fmt(p.beta_rr_se),
                            _fmt(p.mi_xy)]) + "\n")
    return buf.getvalue()


def sweep_from_csv(text: str) -> list[dict]:
    lines = text.strip().splitlines()
    if not lines or tuple(lines[0].split(",")) != SWEEP_CSV_COLUMNS:
        raise ValueError("missing or malformed sweep CSV header")
    out = []
    for line in lines[1:]:
        vals = line.split(",")
        if len(vals) != len(SWEEP_CSV_COLUMNS):
            raise ValueError(f"malformed sweep CSV row: {line!r}")
        row = dict(zip(SWEEP_CSV_COLUMNS, vals))
        row["detection"] = Detection(row["detection"])
        row["depth"] = int(row["depth"])
        for key in ("snr_db", "beta_dr", "beta_dr_se", "beta_rr", "beta_rr_se", "mi_xy"):
            row[key] = float(row[key])
        out.append(row)
    return out


def sweep_to_json(sweep: EfficiencySweep) -> str:
    """Full sweep document including the per-plane reports behind each point."""
    doc = {
        "grid_snr_db": list(sweep.grid),
        "depths": list(sweep.depths),
        "detections": [d.value for d in sweep.detections],
        "mod_variance": sweep.mod_variance,
        "excess_noise": sweep.excess_noise,
        "monte_carlo": {"n": sweep.mc.n, "repeats": sweep.mc.repeats,
                        "seed": sweep.mc.seed},
        "warnings": list(sweep.warnings),
        "points": [
            {
                "snr_db": p.snr_db,
                "detection": p.detection.value,
                "depth": p.depth,
                "beta_dr": p.beta_dr, "beta_dr_se": p.beta_dr_se,
                "beta_rr": p.beta_rr, "beta_rr_se": p.beta_rr_se,
                "mi_sum_dr": p.mi_sum_dr, "mi_sum_rr": p.mi_sum_rr,
                "mi_xy": p.mi_xy,
                "levels": [
                    {"level": r.level, "p": r.p_transition, "p_se": r.p_se,
                     "c_bsc": r.bsc_capacity,
                     "mi_dr": r.mi_dr, "mi_dr_se": r.mi_dr_se,
                     "mi_rr": r.mi_rr, "mi_rr_se": r.mi_rr_se}
                    for r in p.reports
                ],
            }
            for p in sweep.points
        ],
    }
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"
