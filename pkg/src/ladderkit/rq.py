"""Rate-quality domain model: curves, Pareto fronts, crossings, ladders.

Everything in this module is pure and operates on immutable inputs, so all
functions are safe to call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

LOG_RATE_TOL = 1e-9


@dataclass(frozen=True, order=True)
class Resolution:
    """A spatial resolution with a canonical streaming label (e.g. 2160p)."""

    width: int
    height: int
    label: str = field(compare=False)

    def __post_init__(self):
        if not (self.width >= self.height > 0):
            raise ValueError(f"invalid resolution {self.width}x{self.height}")

    @property
    def pixels(self) -> int:
        return self.width * self.height


RES_2160P = Resolution(3840, 2160, "2160p")
RES_1080P = Resolution(1920, 1080, "1080p")
RES_720P = Resolution(1280, 720, "720p")
RES_540P = Resolution(960, 540, "540p")

#: Default resolution set, ordered descending by pixel count.
DEFAULT_RESOLUTIONS = (RES_2160P, RES_1080P, RES_720P, RES_540P)

#: Default quantization-parameter sweep.
DEFAULT_QPS = tuple(range(15, 46))


def resolution_set(resolutions) -> tuple[Resolution, ...]:
    """Validate and order a collection of resolutions descending by pixels."""
    rs = tuple(sorted(resolutions, key=lambda r: r.pixels, reverse=True))
    labels = [r.label for r in rs]
    if len(set(labels)) != len(labels):
        raise ValueError(f"duplicate resolution labels: {labels}")
    return rs


@dataclass(frozen=True)
class RQPoint:
    """One encode outcome: rate (kbps), quality (dB), its QP and resolution."""

    rate: float
    quality: float
    qp: int
    resolution: Resolution
    log_rate: float = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.rate <= 0:
            raise ValueError(f"rate must be positive, got {self.rate}")
        lr = math.log2(self.rate)
        if self.log_rate is None:
            object.__setattr__(self, "log_rate", lr)
        elif abs(self.log_rate - lr) > LOG_RATE_TOL:
            raise ValueError(
                f"log_rate {self.log_rate} inconsistent with rate {self.rate}"
            )


@dataclass(frozen=True)
class RQCurve:
    """Per-resolution QP sweep, one point per QP, sorted by QP ascending."""

    resolution: Resolution
    points: tuple[RQPoint, ...]

    def __post_init__(self):
        pts = tuple(sorted(self.points, key=lambda p: p.qp))
        qps = [p.qp for p in pts]
        if len(set(qps)) != len(qps):
            raise ValueError(f"duplicate QP in curve at {self.resolution.label}")
        for p in pts:
            if p.resolution != self.resolution:
                raise ValueError("curve mixes resolutions")
        object.__setattr__(self, "points", pts)

    def qps(self) -> list[int]:
        return [p.qp for p in self.points]

    def monotone_points(self) -> tuple[RQPoint, ...]:
        """Points surviving in-curve dominance, rate strictly decreasing in QP.

        Encoder rate-control noise occasionally yields a higher-QP point with
        rate or quality above its lower-QP neighbour; dominated points are
        dropped before interpolation, later points losing order-violating ties.
        """
        kept: list[RQPoint] = []
        for p in self.points:  # ascending qp: rate and quality should fall
            while kept and p.rate <= kept[-1].rate and p.quality >= kept[-1].quality:
                kept.pop()
            if kept and (p.rate >= kept[-1].rate or p.quality >= kept[-1].quality):
                continue
            kept.append(p)
        return tuple(kept)


@dataclass(frozen=True)
class ParetoFront:
    """Non-dominated rate-quality tuples across resolutions, rate ascending."""

    tuples: tuple[RQPoint, ...]
    source_resolutions: tuple[Resolution, ...]

    def __len__(self) -> int:
        return len(self.tuples)

    def rates(self) -> np.ndarray:
        return np.array([p.rate for p in self.tuples])

    def log_rates(self) -> np.ndarray:
        return np.array([p.log_rate for p in self.tuples])

    def qualities(self) -> np.ndarray:
        return np.array([p.quality for p in self.tuples])

    def contains(self, resolution: Resolution, qp: int) -> bool:
        return any(
            t.resolution == resolution and t.qp == qp for t in self.tuples
        )


@dataclass(frozen=True)
class CrossoverQP:
    """Integer QP at which a curve meets its neighbour, with level label."""

    resolution: Resolution
    level: str  # "high" or "low"
    qp: int
    rate: float | None = None

    def __post_init__(self):
        if self.level not in ("high", "low"):
            raise ValueError(f"level must be high/low, got {self.level}")


@dataclass(frozen=True)
class CrossoverPair:
    """Crossing of two adjacent-resolution curves.

    ``upper`` is the higher resolution meeting the neighbour at the high end
    of its QP range, ``lower`` the lower resolution at its low end.
    """

    upper: CrossoverQP
    lower: CrossoverQP

    def __post_init__(self):
        if self.upper.resolution.pixels <= self.lower.resolution.pixels:
            raise ValueError("upper must be the higher resolution")
        if self.upper.level != "high" or self.lower.level != "low":
            raise ValueError("pair levels must be (high, low)")


@dataclass(frozen=True)
class LadderConfig:
    """Bitrate range and subsampling constraints for ladder construction."""

    r_min: float = 150.0
    r_max: float = 25000.0
    epsilon: float = 0.5  # min dB gained per log2-rate unit before saturation
    q_max: float | None = None  # disabled for PSNR by default
    doubling_factor: float = 2.0

    def __post_init__(self):
        if not (0 < self.r_min < self.r_max):
            raise ValueError("need 0 < r_min < r_max")
        if self.epsilon < 0:
            raise ValueError("epsilon must be >= 0")
        if self.doubling_factor <= 1:
            raise ValueError("doubling_factor must exceed 1")


@dataclass(frozen=True)
class LadderRung:
    """One ladder entry: achieved rate/quality at (qp, resolution)."""

    rate: float
    quality: float
    qp: int
    resolution: Resolution
    target_rate: float = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.target_rate is None:
            object.__setattr__(self, "target_rate", self.rate)

    @property
    def log_rate(self) -> float:
        return math.log2(self.rate)


@dataclass(frozen=True)
class BitrateLadder:
    """Ordered encode recipes served under varying bandwidth.

    Builders emit rungs strictly increasing in rate and quality; the
    constructor stays permissive so repair_ladder can accept raw input.
    """

    rungs: tuple[LadderRung, ...]
    method: str = "RL"  # RL, IL, FL or HL
    encode_count: int = 0

    def __post_init__(self):
        if self.method not in ("RL", "IL", "FL", "HL"):
            raise ValueError(f"unknown method {self.method}")

    def __len__(self) -> int:
        return len(self.rungs)

    @property
    def is_monotone(self) -> bool:
        pairs = zip(self.rungs, self.rungs[1:])
        return all(b.rate > a.rate and b.quality > a.quality for a, b in pairs)


def build_pareto_front(points) -> ParetoFront:
    """Return the non-dominated subset under (min rate, max quality).

    A point is dominated if another point has rate <= and quality >= with at
    least one strict. Ties: at equal rate only the best quality survives; an
    exact (rate, quality) duplicate keeps the lowest-resolution entry, which
    is the cheapest to decode.
    """
    points = list(points)
    if not points:
        raise ValueError("no points")
    ordered = sorted(
        points, key=lambda p: (p.rate, -p.quality, p.resolution.pixels)
    )
    front: list[RQPoint] = []
    best_q = -math.inf
    for p in ordered:
        if p.quality > best_q:
            front.append(p)
            best_q = p.quality
    resolutions = resolution_set({p.resolution for p in points})
    return ParetoFront(tuples=tuple(front), source_resolutions=resolutions)


def _quality_of_log_rate(curve: RQCurve) -> tuple[PchipInterpolator, float, float]:
    """Continuous quality(logRate) for one curve plus its logRate span."""
    pts = curve.monotone_points()
    if len(pts) < 2:
        raise ValueError(
            f"curve at {curve.resolution.label} has fewer than 2 usable points"
        )
    # ascending qp means descending rate; re-sort by log_rate for PCHIP
    lr = np.array([p.log_rate for p in pts])[::-1]
    q = np.array([p.quality for p in pts])[::-1]
    return PchipInterpolator(lr, q, extrapolate=False), lr[0], lr[-1]


def _nearest_qp(curve: RQCurve, log_rate: float) -> RQPoint:
    pts = curve.monotone_points()
    idx = int(np.argmin([abs(p.log_rate - log_rate) for p in pts]))
    return pts[idx]


def find_intersections(curves) -> list[CrossoverPair]:
    """Locate the crossing of each adjacent-resolution curve pair.

    Quality is interpolated against log2(rate) per curve; the crossing kept
    is the one at the highest bitrate when several exist. The reported
    integer QPs are those of the RQ points nearest the continuous crossing
    on each curve. Pairs whose curves never cross are omitted.
    """
    by_res = {c.resolution: c for c in curves}
    ordered = resolution_set(by_res.keys())
    pairs: list[CrossoverPair] = []
    for hi_res, lo_res in zip(ordered, ordered[1:]):
        hi, lo = by_res[hi_res], by_res[lo_res]
        f_hi, hi_a, hi_b = _quality_of_log_rate(hi)
        f_lo, lo_a, lo_b = _quality_of_log_rate(lo)
        a, b = max(hi_a, lo_a), min(hi_b, lo_b)
        if a >= b:
            continue  # no shared rate range

        def gap(x):
            return float(f_hi(x) - f_lo(x))

        grid = np.linspace(a, b, 512)
        vals = f_hi(grid) - f_lo(grid)
        crossing = None
        for i in range(len(grid) - 1, 0, -1):  # highest bitrate first
            lo_v, hi_v = vals[i - 1], vals[i]
            if lo_v == 0.0 and hi_v == 0.0:
                continue
            if lo_v * hi_v <= 0.0 and (lo_v != 0.0 or hi_v != 0.0):
                crossing = brentq(gap, grid[i - 1], grid[i])
                break
        if crossing is None:
            continue
        up_pt = _nearest_qp(hi, crossing)
        lo_pt = _nearest_qp(lo, crossing)
        pairs.append(
            CrossoverPair(
                upper=CrossoverQP(hi_res, "high", up_pt.qp, up_pt.rate),
                lower=CrossoverQP(lo_res, "low", lo_pt.qp, lo_pt.rate),
            )
        )
    return pairs


def _front_slopes(front: ParetoFront) -> np.ndarray:
    """Local dQ/dlog2(R) per front point.

    Forward difference to the next front point; the last point falls back to
    its backward difference so saturation at the top of the range is visible.
    """
    lr = front.log_rates()
    q = front.qualities()
    if len(lr) == 1:
        return np.array([math.inf])
    d = np.diff(q) / np.diff(lr)
    return np.append(d, d[-1])


def build_reference_ladder(front: ParetoFront, cfg: LadderConfig) -> BitrateLadder:
    """Subsample a Pareto front into a ladder per the doubling rule.

    The front is trimmed to [r_min, r_max]; rungs walk up from the lowest
    admissible rate, each snapping to the front point nearest the previous
    rung's logRate plus log2(doubling_factor) (ties toward the lower rate).
    Rungs in the saturated region (local slope <= epsilon) or above q_max
    are pruned, so the ladder length varies with content.
    """
    if not front.tuples:
        raise ValueError("empty front")
    keep = [p for p in front.tuples if cfg.r_min <= p.rate <= cfg.r_max]
    if not keep:
        return BitrateLadder(rungs=(), method="RL")
    trimmed = ParetoFront(tuple(keep), front.source_resolutions)
    lr = trimmed.log_rates()
    slopes = _front_slopes(trimmed)
    step = math.log2(cfg.doubling_factor)

    chosen: list[int] = [0]
    while chosen[-1] < len(lr) - 1:
        target = lr[chosen[-1]] + step
        best = min(
            range(chosen[-1] + 1, len(lr)),
            key=lambda i: (abs(lr[i] - target), lr[i]),
        )
        # never close the ladder with a fragment rung well short of a step
        if best == len(lr) - 1 and lr[best] - lr[chosen[-1]] <= step / 2:
            break
        chosen.append(best)

    rungs = []
    for i in chosen:
        p = trimmed.tuples[i]
        if cfg.q_max is not None and p.quality > cfg.q_max:
            continue
        if slopes[i] <= cfg.epsilon:
            continue
        rungs.append(LadderRung(p.rate, p.quality, p.qp, p.resolution))
    return BitrateLadder(rungs=tuple(rungs), method="RL")


def repair_ladder(ladder: BitrateLadder) -> BitrateLadder:
    """Re-sort rungs and drop non-monotone or below-chord entries.

    A rung sitting below the straight line joining its neighbours in
    (log2 rate, quality) marks a suboptimal encode and is removed. The
    result is strictly increasing in both rate and quality. Idempotent.
    """
    rungs = sorted(ladder.rungs, key=lambda r: (r.rate, -r.quality))
    changed = True
    while changed:
        changed = False
        # equal-rate duplicates: keep the best quality
        dedup: list[LadderRung] = []
        for r in rungs:
            if dedup and r.rate == dedup[-1].rate:
                changed = True
                continue
            dedup.append(r)
        rungs = dedup
        # quality must strictly increase with rate; a later rung at lower
        # or equal quality is dominated by its predecessor
        mono: list[LadderRung] = []
        for r in rungs:
            if mono and r.quality <= mono[-1].quality:
                changed = True
                continue
            mono.append(r)
        rungs = mono
        # chord test on interior rungs
        i = 1
        while i < len(rungs) - 1:
            a, b, c = rungs[i - 1], rungs[i], rungs[i + 1]
            t = (b.log_rate - a.log_rate) / (c.log_rate - a.log_rate)
            chord = a.quality + t * (c.quality - a.quality)
            if b.quality < chord:
                del rungs[i]
                changed = True
            else:
                i += 1
    return replace(ladder, rungs=tuple(rungs))
