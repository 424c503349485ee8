"""Dataset-level descriptors: SI, TI, motion magnitude and colourfulness.

These summarize corpus coverage rather than feed the regressors. SI and TI
follow the usual 0..255 luma convention; MV uses exhaustive full-pel block
matching; CF is the Hasler-Suesstrunk colourfulness statistic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from ladderkit.media.io import Frame, Sequence

MV_BLOCK = 16
MV_RANGE = 16


@dataclass(frozen=True)
class DatasetDescriptor:
    si: float
    ti: float
    mv: float
    cf: float

    def __post_init__(self):
        if min(self.si, self.ti, self.mv, self.cf) < 0:
            raise ValueError("descriptors must be non-negative")


def _luma_255(frame: Frame) -> np.ndarray:
    return frame.luma_normalized() * 255.0


def spatial_information(seq: Sequence) -> float:
    """Max over frames of the std of the Sobel gradient magnitude."""
    best = 0.0
    for frame in seq.frames():
        y = _luma_255(frame)
        gx = ndimage.sobel(y, axis=1, mode="reflect")
        gy = ndimage.sobel(y, axis=0, mode="reflect")
        best = max(best, float(np.hypot(gx, gy).std()))
    return best


def temporal_information(seq: Sequence) -> float:
    """Max over frame pairs of the std of the luma difference."""
    best = 0.0
    prev = None
    for frame in seq.frames():
        y = _luma_255(frame)
        if prev is not None:
            best = max(best, float((y - prev).std()))
        prev = y
    return best


def _block_motion(prev: np.ndarray, cur: np.ndarray) -> list[float]:
    """Best-SAD displacement magnitude per non-flat block of `cur`.

    Flat blocks match everywhere and carry no motion evidence, so they are
    skipped. Ties resolve to the smallest displacement, scanned in order of
    magnitude, which pins static content to zero motion.
    """
    h, w = cur.shape
    nby, nbx = h // MV_BLOCK, w // MV_BLOCK
    if nby == 0 or nbx == 0:
        return []
    crop = cur[: nby * MV_BLOCK, : nbx * MV_BLOCK]
    blocks = crop.reshape(nby, MV_BLOCK, nbx, MV_BLOCK).swapaxes(1, 2)
    flat = blocks.std(axis=(2, 3)) == 0

    best_sad = np.full((nby, nbx), np.inf)
    best_mag = np.zeros((nby, nbx))
    disps = sorted(
        (
            (dy, dx)
            for dy in range(-MV_RANGE, MV_RANGE + 1)
            for dx in range(-MV_RANGE, MV_RANGE + 1)
        ),
        key=lambda d: (d[0] * d[0] + d[1] * d[1], d),
    )
    by = np.arange(nby) * MV_BLOCK
    bx = np.arange(nbx) * MV_BLOCK
    for dy, dx in disps:
        # candidate windows must lie fully inside the previous frame
        ok_y = (by + dy >= 0) & (by + dy + MV_BLOCK <= h)
        ok_x = (bx + dx >= 0) & (bx + dx + MV_BLOCK <= w)
        if not ok_y.any() or not ok_x.any():
            continue
        a, b = _aligned(cur, prev, dy, dx)
        sad_full = np.abs(a - b)
        # box-sum the overlapping region into block sums
        sad = _block_sums(sad_full, dy, dx, nby, nbx)
        valid = np.outer(ok_y, ok_x)
        improved = valid & (sad < best_sad)
        best_sad[improved] = sad[improved]
        best_mag[improved] = np.hypot(dy, dx)
    return [float(m) for m in best_mag[~flat & np.isfinite(best_sad)]]


def _aligned(cur: np.ndarray, prev: np.ndarray, dy: int, dx: int):
    h, w = cur.shape
    y0, y1 = max(0, -dy), h - max(0, dy)
    x0, x1 = max(0, -dx), w - max(0, dx)
    return cur[y0:y1, x0:x1], prev[y0 + dy : y1 + dy, x0 + dx : x1 + dx]


def _block_sums(sad_full: np.ndarray, dy: int, dx: int, nby: int, nbx: int) -> np.ndarray:
    """Per-block SAD sums via integral image, inf where not fully covered."""
    out = np.full((nby, nbx), np.inf)
    # sad_full covers cur[y_off:, x_off:]; block (i, j) starts at (i*B, j*B)
    y_off, x_off = max(0, -dy), max(0, -dx)
    h, w = sad_full.shape
    ii = np.zeros((h + 1, w + 1))
    ii[1:, 1:] = sad_full.cumsum(0).cumsum(1)
    rows = np.arange(nby) * MV_BLOCK - y_off
    cols = np.arange(nbx) * MV_BLOCK - x_off
    rok = (rows >= 0) & (rows + MV_BLOCK <= h)
    cok = (cols >= 0) & (cols + MV_BLOCK <= w)
    r = rows[rok][:, None]
    c = cols[cok][None, :]
    sums = (
        ii[r + MV_BLOCK, c + MV_BLOCK]
        - ii[r, c + MV_BLOCK]
        - ii[r + MV_BLOCK, c]
        + ii[r, c]
    )
    out[np.ix_(rok, cok)] = sums
    return out


def motion_magnitude(seq: Sequence) -> float:
    """Mean block-matching displacement magnitude across all frame pairs."""
    mags: list[float] = []
    prev = None
    for frame in seq.frames():
        y = _luma_255(frame)
        if prev is not None:
            mags.extend(_block_motion(prev, y))
        prev = y
    return float(np.mean(mags)) if mags else 0.0


# BT.709 limited-range YUV -> RGB
_KR, _KB = 0.2126, 0.0722
_KG = 1.0 - _KR - _KB


def _frame_rgb(frame: Frame) -> np.ndarray | None:
    if frame.u is None or frame.v is None:
        return None
    d = frame.bit_depth
    scale = 1 << (d - 8)
    y = (frame.y.astype(np.float64) - 16 * scale) / (219 * scale)
    u = (frame.u.astype(np.float64) - 128 * scale) / (224 * scale)
    v = (frame.v.astype(np.float64) - 128 * scale) / (224 * scale)
    u = u.repeat(2, axis=0).repeat(2, axis=1)[: y.shape[0], : y.shape[1]]
    v = v.repeat(2, axis=0).repeat(2, axis=1)[: y.shape[0], : y.shape[1]]
    r = y + 2 * (1 - _KR) * v
    b = y + 2 * (1 - _KB) * u
    g = (y - _KR * r - _KB * b) / _KG
    return np.clip(np.stack([r, g, b]) * 255.0, 0.0, 255.0)


def colourfulness(seq: Sequence) -> float:
    """Mean Hasler-Suesstrunk colourfulness across frames; 0 without chroma."""
    vals = []
    for frame in seq.frames():
        rgb = _frame_rgb(frame)
        if rgb is None:
            return 0.0
        r, g, b = rgb
        rg = r - g
        yb = (r + g) / 2.0 - b
        vals.append(
            float(
                np.hypot(rg.std(), yb.std())
                + 0.3 * np.hypot(rg.mean(), yb.mean())
            )
        )
    return float(np.mean(vals))


def dataset_descriptors(seq: Sequence) -> DatasetDescriptor:
    """SI, TI, MV, CF for one sequence (TI and MV need >= 2 frames)."""
    if seq.frame_count < 2:
        raise ValueError("descriptors need at least 2 frames")
    return DatasetDescriptor(
        si=spatial_information(seq),
        ti=temporal_information(seq),
        mv=motion_magnitude(seq),
        cf=colourfulness(seq),
    )
