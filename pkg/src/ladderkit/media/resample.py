"""Separable Lanczos-3 spatial resampling.

The kernel is sinc(t)*sinc(t/3) with support |t| < 3. When downscaling, the
kernel is stretched by the scale factor so it low-passes before decimation;
weights are renormalized per output sample, which preserves flat fields
exactly and keeps the operator linear.
"""

from __future__ import annotations

import numpy as np

from ladderkit.media.io import Frame
from ladderkit.rq import Resolution

_A = 3  # lobes


def _lanczos_kernel(t: np.ndarray) -> np.ndarray:
    out = np.sinc(t) * np.sinc(t / _A)
    out[np.abs(t) >= _A] = 0.0
    return out


def _axis_weights(src_len: int, dst_len: int):
    """Sample positions and normalized weights for one axis.

    Returns (index matrix, weight matrix) of shape (dst_len, taps). Indices
    are clamped to the valid range, replicating edge samples.
    """
    scale = src_len / dst_len
    support = _A * max(scale, 1.0)
    centers = (np.arange(dst_len) + 0.5) * scale - 0.5
    left = np.floor(centers - support).astype(int) + 1
    taps = int(np.ceil(2 * support)) + 1
    idx = left[:, None] + np.arange(taps)[None, :]
    t = (idx - centers[:, None]) / max(scale, 1.0)
    w = _lanczos_kernel(t)
    w /= w.sum(axis=1, keepdims=True)
    np.clip(idx, 0, src_len - 1, out=idx)
    return idx, w


def resample_plane(plane: np.ndarray, out_height: int, out_width: int) -> np.ndarray:
    """Lanczos-3 resample of a 2-D plane to the given size (float64 output).

    Identity (same object semantics not guaranteed, values bit-exact) when
    the size is unchanged. No range clipping: callers clip where they care.
    """
    if out_height <= 0 or out_width <= 0:
        raise ValueError(f"bad target size {out_width}x{out_height}")
    src = np.asarray(plane, dtype=np.float64)
    if src.shape == (out_height, out_width):
        return src.copy()
    # horizontal pass, then vertical pass
    idx, w = _axis_weights(src.shape[1], out_width)
    mid = np.einsum("hkt,kt->hk", src[:, idx], w)
    idx, w = _axis_weights(src.shape[0], out_height)
    return np.einsum("ktw,kt->kw", mid[idx, :], w)


def lanczos3_resample(frame: Frame, target: Resolution) -> Frame:
    """Resample a full frame (luma + chroma) and clip to bit-depth range."""
    peak = frame.peak
    dtype = np.uint16 if frame.bit_depth > 8 else np.uint8

    def finish(plane, h, w):
        res = resample_plane(plane, h, w)
        return np.clip(np.rint(res), 0, peak).astype(dtype)

    y = finish(frame.y, target.height, target.width)
    u = v = None
    if frame.u is not None:
        u = finish(frame.u, target.height // 2, target.width // 2)
        v = finish(frame.v, target.height // 2, target.width // 2)
    return Frame(y=y, u=u, v=v, bit_depth=frame.bit_depth)
