"""Seeded Monte-Carlo certification of the metric inequalities and identities.

Random streams
--------------
Every sample draws from its own Philox4x64-10 generator (numpy's
``np.random.Philox``) with

* key     = ``(seed, stream_id)`` where ``stream_id`` is fixed per check, and
* counter = ``(0, 0, sample_index, 0)``.

A sample's numbers therefore depend only on ``(seed, check, index)``, so
results do not change with the number of workers or the order in which
shards finish. This layout is part of the reproducibility contract; changing
it changes every report.
"""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from .channel import contraction_factor
from .geodesic import arc_grid, deform_points, frame_from_seed, geodesic_points
from .hilbert import density_from_bloch, pauli_dot
from .metric import (
    PureStateChart,
    TangentOperator,
    bures_distance,
    bures_line_element,
    bures_line_element_depolarized,
    fubini_study_overlap,
    fubini_study_quadratic,
    line_element_bloch,
    line_element_depolarized,
    line_element_operator,
    pure_state_line_element,
)

log = logging.getLogger(__name__)

DEFAULT_GRID = tuple(float(x) for x in np.linspace(0.0, 1.0, 21))
TANGENT_SCALE = 1e-3
MONOTONE_SLACK = 1e-12
CHART_TOL = 1e-10
CLOSURE_TOL = 1e-12
H_LADDER = (1e-2, 1e-3, 1e-4)
MIN_ORDER = 2.5
MAX_REFINEMENTS = 2
ARC_SAMPLES = 64

_STREAMS = {
    "monotonicity": 1,
    "bures_monotonicity": 2,
    "chart_consistency": 3,
    "fubini_relation": 4,
    "geodesic_closure": 5,
    "bures_expansion": 6,
}


@dataclass(frozen=True)
class SampleConfig:
    seed: int = 1
    count: int = 10_000
    prob_grid: tuple[float, ...] = DEFAULT_GRID
    radius_cap: float = 0.99

    def __post_init__(self) -> None:
        if not isinstance(self.seed, (int, np.integer)) or not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if not isinstance(self.count, (int, np.integer)) or self.count < 1:
            raise ValueError(f"count must be a positive integer, got {self.count!r}")
        grid = tuple(float(p) for p in self.prob_grid)
        if not grid or any(not 0.0 <= p <= 1.0 for p in grid):
            raise ValueError(f"prob_grid values must lie in [0, 1], got {grid}")
        if not 0.0 < self.radius_cap < 1.0:
            raise ValueError(f"radius_cap must lie in (0, 1), got {self.radius_cap!r}")
        object.__setattr__(self, "prob_grid", grid)


@dataclass(frozen=True)
class VerificationReport:
    check_name: str
    samples: int
    violations: int
    worst_margin: float
    seed: int
    elapsed_ms: float = field(default=0.0, compare=False)
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_dict(self, include_timing: bool = False) -> dict:
        d = asdict(self)
        if not include_timing:
            d.pop("elapsed_ms")
        return d


def sample_rng(seed: int, stream: int, index: int) -> np.random.Generator:
    key = np.array([seed, stream], dtype=np.uint64)
    counter = np.array([0, 0, index, 0], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key, counter=counter))


def _shard_map(fn: Callable[[int], object], count: int, workers: int) -> list:
    """Evaluate ``fn(i)`` for ``i < count`` in index order, optionally threaded."""
    if workers <= 1 or count < 2:
        return [fn(i) for i in range(count)]
    bounds = np.linspace(0, count, min(workers, count) + 1).astype(int)

    def run(lo_hi):
        lo, hi = lo_hi
        return [fn(i) for i in range(lo, hi)]

    with ThreadPoolExecutor(max_workers=workers) as pool:
        chunks = list(pool.map(run, zip(bounds[:-1], bounds[1:])))
    return [r for chunk in chunks for r in chunk]


def uniform_ball(rng: np.random.Generator, radius: float) -> np.ndarray:
    g = rng.standard_normal(3)
    return radius * rng.random() ** (1.0 / 3.0) * g / np.linalg.norm(g)


def unit_vector(rng: np.random.Generator, n: int = 3) -> np.ndarray:
    g = rng.standard_normal(n)
    return g / np.linalg.norm(g)


def fit_convergence_order(hs: Sequence[float], errs: Sequence[float]) -> tuple[float, float]:
    """Least-squares fit of ``err = C h^k``; returns ``(k, C)``.

    Exactly vanishing errors count as converged to all orders.
    """
    hs = np.asarray(hs, dtype=float)
    errs = np.asarray(errs, dtype=float)
    if np.all(errs == 0.0):
        return math.inf, 0.0
    y = np.log(np.maximum(errs, 1e-300))
    k, logc = np.polyfit(np.log(hs), y, 1)
    return float(k), float(math.exp(logc))


def ladder_order(
    errors: Callable[[Sequence[float]], np.ndarray],
    hs: Sequence[float] = H_LADDER,
    max_refinements: int = MAX_REFINEMENTS,
    initial: Sequence[float] | None = None,
) -> tuple[float, float, int]:
    """Observed convergence order of ``errors(hs)`` with decade refinement.

    When the fit on ``hs`` falls below ``MIN_ORDER`` the window slides one
    decade finer (dropping the coarsest step), up to ``max_refinements``
    times. Near-cancelling third/fourth-order terms can put a single rung of
    the base ladder off-trend; an error that is genuinely only O(h^2) keeps
    failing under refinement.

    ``initial`` may carry already-computed errors on ``hs``.

    Returns ``(order, constant, refinements_used)``.
    """
    hs = list(hs)
    errs = list(errors(hs) if initial is None else initial)
    k, c = fit_convergence_order(hs, errs)
    used = 0
    while k < MIN_ORDER and used < max_refinements:
        h_new = hs[-1] / 10.0
        hs = hs[1:] + [h_new]
        errs = errs[1:] + list(errors([h_new]))
        k, c = fit_convergence_order(hs, errs)
        used += 1
    return k, c, used


def _timed(name: str, cfg: SampleConfig, body: Callable[[], tuple[int, int, float, dict]]) -> VerificationReport:
    t0 = time.perf_counter()
    samples, violations, worst, details = body()
    ms = (time.perf_counter() - t0) * 1e3
    log.info("%s: %d/%d violations, worst margin %.3e (%.1f ms)", name, violations, samples, worst, ms)
    return VerificationReport(name, int(samples), int(violations), float(worst), int(cfg.seed), ms, details)


def _draw_ball_tangent(cfg: SampleConfig, stream: str, radius: float, workers: int):
    sid = _STREAMS[stream]

    def draw(i):
        rng = sample_rng(cfg.seed, sid, i)
        return uniform_ball(rng, radius), TANGENT_SCALE * unit_vector(rng)

    pairs = _shard_map(draw, cfg.count, workers)
    return np.array([p for p, _ in pairs]), np.array([d for _, d in pairs])


def check_monotonicity(cfg: SampleConfig, workers: int = 1) -> VerificationReport:
    """Depolarization never increases the statistical line element."""

    def body():
        p, dp = _draw_ball_tangent(cfg, "monotonicity", cfg.radius_cap, workers)
        ds2 = line_element_bloch(p, dp)
        viol, worst, rows = 0, math.inf, []
        for prob in cfg.prob_grid:
            margin = ds2 - line_element_depolarized(p, dp, prob)
            viol += int(np.sum(margin < -MONOTONE_SLACK))
            worst = min(worst, float(margin.min()))
            rows.append(float(margin.min()))
        return cfg.count * len(cfg.prob_grid), viol, worst, {"row_min_margin": rows}

    return _timed("monotonicity", cfg, body)


def check_bures_monotonicity(cfg: SampleConfig, workers: int = 1) -> VerificationReport:
    """Bures line element shrinks under depolarization, and the algebraic
    criterion ``x^2 <= (1 + 1/f^2) / 4`` holds wherever ``f != 0``."""

    def body():
        x, dx = _draw_ball_tangent(cfg, "bures_monotonicity", cfg.radius_cap / 2.0, workers)
        und = bures_line_element(x, dx)
        x2 = np.sum(x * x, axis=-1)
        viol, worst, crit_viol = 0, math.inf, 0
        for prob in cfg.prob_grid:
            margin = und - bures_line_element_depolarized(x, dx, prob)
            bad = margin < -MONOTONE_SLACK
            f = contraction_factor(prob)
            if f != 0.0:
                crit_bad = x2 > 0.25 * (1.0 + 1.0 / (f * f))
                crit_viol += int(np.sum(crit_bad))
                bad |= crit_bad
            viol += int(np.sum(bad))
            worst = min(worst, float(margin.min()))
        return cfg.count * len(cfg.prob_grid), viol, worst, {"criterion_violations": crit_viol}

    return _timed("bures_monotonicity", cfg, body)


def check_chart_consistency(
    cfg: SampleConfig, workers: int = 1, tolerance: float = CHART_TOL
) -> VerificationReport:
    """Operator-form and closed-form line elements agree on interior states."""

    def one(i):
        rng = sample_rng(cfg.seed, _STREAMS["chart_consistency"], i)
        p = uniform_ball(rng, cfg.radius_cap)
        dp = TANGENT_SCALE * unit_vector(rng)
        op = line_element_operator(density_from_bloch(p), TangentOperator(pauli_dot(dp) / 2))
        return op, line_element_bloch(p, dp)

    def body():
        vals = np.array(_shard_map(one, cfg.count, workers))
        op, closed = vals[:, 0], vals[:, 1]
        diff = np.abs(op - closed)
        margin = tolerance * (1.0 + closed) - diff
        details = {"max_abs_error": float(diff.max()), "max_rel_error": float(np.max(diff / closed))}
        return cfg.count, int(np.sum(margin < 0)), float(margin.min()), details

    return _timed("chart_consistency", cfg, body)


def random_pure_chart(rng: np.random.Generator) -> tuple[PureStateChart, np.ndarray, np.ndarray]:
    """Random chart in 2-4 dimensions with every ``p_k >= 1/(2N)``, plus a
    unit-norm perturbation direction ``(dp, dphi)`` with ``sum dp = 0``."""
    n = int(rng.integers(2, 5))
    probs = 0.5 / n + 0.5 * rng.dirichlet(np.ones(n))
    probs /= probs.sum()
    phases = rng.uniform(0.0, 2.0 * np.pi, n)
    dp = rng.standard_normal(n)
    dp -= dp.mean()
    dphi = rng.standard_normal(n)
    scale = math.sqrt(float(dp @ dp + dphi @ dphi))
    return PureStateChart(probs, phases), dp / scale, dphi / scale


def fubini_errors(psi: PureStateChart, dp, dphi, hs=H_LADDER) -> tuple[np.ndarray, np.ndarray]:
    """For each step ``h`` return

    * ``|2 tr(drho^2) - 4 * FS quadratic form|``: the second-order gap, and
    * ``|2 tr(drho^2) - 4 (1 - |<psi'|psi>|^2)|``: the exact identity gap.
    """
    quad, ident = [], []
    for h in hs:
        psi2 = psi.perturbed(h * dp, h * dphi)
        ds2 = pure_state_line_element(psi, psi2)
        quad.append(abs(ds2 - 4.0 * fubini_study_quadratic(psi, h * dp, h * dphi)))
        ident.append(abs(ds2 - 4.0 * fubini_study_overlap(psi, psi2)))
    return np.array(quad), np.array(ident)


def check_fubini_relation(cfg: SampleConfig, workers: int = 1, hs=H_LADDER) -> VerificationReport:
    """``2 tr(drho^2)`` is four times the Fubini-Study line element.

    Per sample: the exact identity ``2 tr(drho^2) = 4 (1 - |<psi'|psi>|^2)``
    must hold to 1e-12 on the ladder, and the gap to ``4 x`` the quadratic
    form must converge with observed order >= ``MIN_ORDER``.
    """

    def one(i):
        rng = sample_rng(cfg.seed, _STREAMS["fubini_relation"], i)
        psi, dp, dphi = random_pure_chart(rng)
        quad, ident = fubini_errors(psi, dp, dphi, hs)
        k, c, used = ladder_order(lambda h: fubini_errors(psi, dp, dphi, h)[0], hs, initial=quad)
        return quad, k, c, used, float(ident.max())

    def body():
        res = _shard_map(one, cfg.count, workers)
        envelope = np.max([r[0] for r in res], axis=0)
        orders = np.array([r[1] for r in res])
        ident = np.array([r[4] for r in res])
        bad = (orders < MIN_ORDER) | (ident > 1e-12)
        details = {
            "envelope_order": fit_convergence_order(hs, envelope)[0],
            "min_order": float(orders.min()),
            "max_constant": float(max(r[2] for r in res)),
            "refined_samples": int(sum(r[3] > 0 for r in res)),
            "max_identity_gap": float(ident.max()),
        }
        return cfg.count, int(bad.sum()), float(orders.min() - MIN_ORDER), details

    return _timed("fubini_relation", cfg, body)


def bures_expansion_errors(x, dx, hs=H_LADDER) -> np.ndarray:
    """``|d_B(rho, rho + h dx.sigma)^2 - ds_B^2(x, h dx)|`` for each ``h``."""
    x = np.asarray(x, dtype=float)
    dx = np.asarray(dx, dtype=float)
    rho = density_from_bloch(2.0 * x)
    out = []
    for h in hs:
        rho2 = density_from_bloch(2.0 * (x + h * dx))
        out.append(abs(bures_distance(rho, rho2) ** 2 - bures_line_element(x, h * dx)))
    return np.array(out)


def bures_step(x, dx, h_max: float = H_LADDER[0]) -> np.ndarray:
    """Shrink ``dx`` so that ``x + h dx`` stays well inside the radius-1/2 ball."""
    room = 0.5 - float(np.linalg.norm(x))
    return dx * min(1.0, 0.5 * room / h_max)


def check_bures_expansion(cfg: SampleConfig, workers: int = 1, hs=H_LADDER) -> VerificationReport:
    """Squared Bures distance between neighbours matches the Bures line
    element to third order in the step."""

    def one(i):
        rng = sample_rng(cfg.seed, _STREAMS["bures_expansion"], i)
        x = uniform_ball(rng, cfg.radius_cap / 2.0)
        dx = bures_step(x, unit_vector(rng), hs[0])
        base = bures_expansion_errors(x, dx, hs)
        k, c, used = ladder_order(lambda h: bures_expansion_errors(x, dx, h), hs, initial=base)
        return base, k, c, used

    def body():
        res = _shard_map(one, cfg.count, workers)
        envelope = np.max([r[0] for r in res], axis=0)
        orders = np.array([r[1] for r in res])
        details = {
            "envelope_order": fit_convergence_order(hs, envelope)[0],
            "min_order": float(orders.min()),
            "max_constant": float(max(r[2] for r in res)),
            "refined_samples": int(sum(r[3] > 0 for r in res)),
        }
        return cfg.count, int(np.sum(orders < MIN_ORDER)), float(orders.min() - MIN_ORDER), details

    return _timed("bures_expansion", cfg, body)


def check_geodesic_closure(
    cfg: SampleConfig, workers: int = 1, arc_samples: int = ARC_SAMPLES
) -> VerificationReport:
    """Deformed great circles stay on S^3 with spatial parts contracted by ``f``."""
    sid = _STREAMS["geodesic_closure"]

    def frame(i):
        rng = sample_rng(cfg.seed, sid, i)
        return frame_from_seed(rng.standard_normal(4), rng.standard_normal(4))

    def body():
        frames = _shard_map(frame, cfg.count, workers)
        s = arc_grid(arc_samples)
        pts = np.stack([geodesic_points(fr, s) for fr in frames])
        viol, worst_dev = 0, 0.0
        norm_dev_max, spatial_dev_max = 0.0, 0.0
        for prob in cfg.prob_grid:
            f = contraction_factor(prob)
            q = deform_points(pts, prob)
            norm_dev = np.abs(np.linalg.norm(q, axis=-1) - 1.0)
            spatial_dev = np.max(np.abs(q[..., 1:] - f * pts[..., 1:]), axis=-1)
            dev = np.maximum(norm_dev, spatial_dev)
            viol += int(np.sum(dev > CLOSURE_TOL))
            worst_dev = max(worst_dev, float(dev.max()))
            norm_dev_max = max(norm_dev_max, float(norm_dev.max()))
            spatial_dev_max = max(spatial_dev_max, float(spatial_dev.max()))
        details = {"max_norm_deviation": norm_dev_max, "max_spatial_deviation": spatial_dev_max}
        return cfg.count * arc_samples * len(cfg.prob_grid), viol, CLOSURE_TOL - worst_dev, details

    return _timed("geodesic_closure", cfg, body)


CHECKS = {
    "monotonicity": check_monotonicity,
    "bures_monotonicity": check_bures_monotonicity,
    "chart_consistency": check_chart_consistency,
    "fubini_relation": check_fubini_relation,
    "geodesic_closure": check_geodesic_closure,
}
EXTRA_CHECKS = {"bures_expansion": check_bures_expansion}


def run_all(cfg: SampleConfig, workers: int = 1) -> list[VerificationReport]:
    return [check(cfg, workers=workers) for check in CHECKS.values()]
