import numpy as np
import pytest

from ladderkit.media.io import ArraySequence, Frame
from ladderkit.rq import Resolution, RQCurve, RQPoint


def make_frame(y, bit_depth=8, chroma="neutral"):
    """Frame from a 2-D luma array; neutral (grey) or absent chroma."""
    y = np.asarray(y)
    dtype = np.uint16 if bit_depth > 8 else np.uint8
    y = y.astype(dtype)
    if chroma is None:
        return Frame(y=y, u=None, v=None, bit_depth=bit_depth)
    mid = 1 << (bit_depth - 1)
    h, w = y.shape
    u = np.full((h // 2, w // 2), mid, dtype=dtype)
    return Frame(y=y, u=u, v=u.copy(), bit_depth=bit_depth)


def make_sequence(lumas, bit_depth=8, fps=60.0, seq_id="seq"):
    return ArraySequence(
        [make_frame(y, bit_depth=bit_depth) for y in lumas],
        frame_rate=fps,
        seq_id=seq_id,
    )


def line_curve(resolution, alpha, beta, q0, q1, qps=range(15, 46)):
    """RQ curve whose points lie exactly on qp = alpha*log2(R) + beta and
    quality = q0 - q1*qp."""
    pts = []
    for qp in qps:
        log_rate = (qp - beta) / alpha
        pts.append(
            RQPoint(
                rate=2.0**log_rate,
                quality=q0 - q1 * qp,
                qp=qp,
                resolution=resolution,
            )
        )
    return RQCurve(resolution=resolution, points=tuple(pts))


def brute_force_front(points):
    """O(n^2) dominance filter used as the Pareto oracle.

    Applies the same tie rules as the production code: equal (rate, quality)
    groups keep the lowest-pixel entry.
    """
    survivors = []
    for p in points:
        dominated = False
        for q in points:
            if q is p:
                continue
            if (
                q.rate <= p.rate
                and q.quality >= p.quality
                and (q.rate < p.rate or q.quality > p.quality)
            ):
                dominated = True
                break
        if not dominated:
            survivors.append(p)
    dedup = {}
    for p in survivors:
        key = (p.rate, p.quality)
        if key not in dedup or p.resolution.pixels < dedup[key].resolution.pixels:
            dedup[key] = p
    return sorted(dedup.values(), key=lambda p: p.rate)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_points(rng, n, resolutions, snap=False):
    """Random RQ cloud; snap quantizes rate/quality to provoke ties."""
    pts = []
    for i in range(n):
        res = resolutions[int(rng.integers(len(resolutions)))]
        rate = float(rng.uniform(100, 30000))
        quality = float(rng.uniform(25, 48))
        if snap:
            rate = round(rate, -2)
            quality = round(quality * 2) / 2
        pts.append(
            RQPoint(rate=rate, quality=quality, qp=int(rng.integers(15, 46)), resolution=res)
        )
    return pts
