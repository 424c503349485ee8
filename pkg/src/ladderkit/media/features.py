"""Spatio-temporal content features driving ladder prediction.

Three families, 23 values per sequence:

* f1-f10: grey-level co-occurrence statistics (contrast, correlation,
  homogeneity, energy, entropy), mean then std across frames.
* f11-f20: temporal-coherence statistics (mean, std, skewness, kurtosis,
  entropy of the per-block inter-frame correlation map), mean then std
  across frame pairs.
* f21-f23: mean squared error after a Lanczos round trip through 1/2, 1/3
  and 1/4 scale, computed on the first frame.

All computations use the luma plane at its native resolution, normalized to
the bit-depth peak so mixed-depth corpora share one scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ladderkit.media.io import Frame, Sequence
from ladderkit.media.resample import lanczos3_resample
from ladderkit.rq import Resolution

GLCM_LEVELS = 32
GLCM_OFFSETS = ((0, 1), (1, 0), (1, 1), (1, -1))  # (dy, dx)

TC_BLOCK = 32
TC_HIST_BINS = 64

#: Sentinels for moment statistics of an all-equal map (Gaussian reference).
SKEWNESS_SENTINEL = 0.0
KURTOSIS_SENTINEL = 3.0

FEATURE_NAMES = (
    "glcm_contrast_mean", "glcm_correlation_mean", "glcm_homogeneity_mean",
    "glcm_energy_mean", "glcm_entropy_mean",
    "glcm_contrast_std", "glcm_correlation_std", "glcm_homogeneity_std",
    "glcm_energy_std", "glcm_entropy_std",
    "tc_mean_mean", "tc_std_mean", "tc_skewness_mean", "tc_kurtosis_mean",
    "tc_entropy_mean",
    "tc_mean_std", "tc_std_std", "tc_skewness_std", "tc_kurtosis_std",
    "tc_entropy_std",
    "rescale_mse_half", "rescale_mse_third", "rescale_mse_quarter",
)

#: Selector inputs: the spatio-temporal block, excluding rescale features.
TEXTURE_FEATURE_COUNT = 20


@dataclass(frozen=True)
class FeatureVector:
    """Per-sequence feature row, ordered as FEATURE_NAMES."""

    sequence_id: str
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) != len(FEATURE_NAMES):
            raise ValueError(f"expected {len(FEATURE_NAMES)} features")
        if not all(np.isfinite(self.values)):
            raise ValueError("features must be finite")

    def __getitem__(self, name: str) -> float:
        return self.values[FEATURE_NAMES.index(name)]

    def as_array(self) -> np.ndarray:
        return np.array(self.values, dtype=np.float64)


def _shifted_views(img: np.ndarray, dy: int, dx: int):
    """Co-located views (a, b) where b is a displaced by (dy, dx)."""
    h, w = img.shape
    y0, y1 = max(0, -dy), h - max(0, dy)
    x0, x1 = max(0, -dx), w - max(0, dx)
    a = img[y0:y1, x0:x1]
    b = img[y0 + dy : y1 + dy, x0 + dx : x1 + dx]
    return a, b


def glcm_matrix(levels_img: np.ndarray, levels: int = GLCM_LEVELS) -> np.ndarray:
    """Symmetric co-occurrence matrix averaged over the four offsets."""
    acc = np.zeros((levels, levels), dtype=np.float64)
    for dy, dx in GLCM_OFFSETS:
        a, b = _shifted_views(levels_img, dy, dx)
        pairs = a * levels + b
        counts = np.bincount(pairs.ravel(), minlength=levels * levels)
        m = counts.reshape(levels, levels).astype(np.float64)
        acc += m + m.T  # symmetric accumulation
    return acc / acc.sum()


def glcm_descriptors(frame_luma: np.ndarray, bit_depth: int) -> dict[str, float]:
    """Contrast, correlation, homogeneity, energy and entropy of one frame."""
    shift = bit_depth - GLCM_LEVELS.bit_length() + 1  # top 5 bits
    levels_img = (frame_luma.astype(np.int64) >> shift).clip(0, GLCM_LEVELS - 1)
    p = glcm_matrix(levels_img)
    i = np.arange(GLCM_LEVELS, dtype=np.float64)
    ii, jj = np.meshgrid(i, i, indexing="ij")
    contrast = float(np.sum((ii - jj) ** 2 * p))
    homogeneity = float(np.sum(p / (1.0 + (ii - jj) ** 2)))
    energy = float(np.sum(p * p))
    nz = p[p > 0]
    entropy = float(-np.sum(nz * np.log2(nz)))
    mu = float(np.sum(i * p.sum(axis=1)))
    var = float(np.sum((i - mu) ** 2 * p.sum(axis=1)))
    if var <= 0:
        correlation = 1.0  # constant field
    else:
        correlation = float(np.sum((ii - mu) * (jj - mu) * p) / var)
    return {
        "contrast": contrast,
        "correlation": correlation,
        "homogeneity": homogeneity,
        "energy": energy,
        "entropy": entropy,
    }


def _block_view(plane: np.ndarray, size: int) -> np.ndarray:
    """(nby, nbx, size, size) view over full blocks, remainder cropped."""
    h, w = plane.shape
    nby, nbx = h // size, w // size
    cropped = plane[: nby * size, : nbx * size]
    return cropped.reshape(nby, size, nbx, size).swapaxes(1, 2)


def coherence_map(prev_luma: np.ndarray, cur_luma: np.ndarray,
                  block: int = TC_BLOCK) -> np.ndarray:
    """Zero-mean normalized cross-correlation of co-located blocks."""
    if min(prev_luma.shape) < block:
        raise ValueError(f"frame smaller than one {block}x{block} block")
    a = _block_view(prev_luma.astype(np.float64), block)
    b = _block_view(cur_luma.astype(np.float64), block)
    am = a - a.mean(axis=(2, 3), keepdims=True)
    bm = b - b.mean(axis=(2, 3), keepdims=True)
    va = np.sum(am * am, axis=(2, 3))
    vb = np.sum(bm * bm, axis=(2, 3))
    cross = np.sum(am * bm, axis=(2, 3))
    out = np.zeros(va.shape)
    live = (va > 0) & (vb > 0)
    out[live] = cross[live] / np.sqrt(va[live] * vb[live])
    both_flat = (va == 0) & (vb == 0)
    means_equal = a.mean(axis=(2, 3)) == b.mean(axis=(2, 3))
    out[both_flat & means_equal] = 1.0  # identical flat blocks cohere fully
    return out


def _map_statistics(values: np.ndarray) -> dict[str, float]:
    x = values.ravel()
    mean = float(x.mean())
    var = float(x.var())
    std = float(np.sqrt(var))
    if var > 0:
        centred = x - mean
        skew = float(np.mean(centred**3) / var**1.5)
        kurt = float(np.mean(centred**4) / var**2)
    else:
        skew, kurt = SKEWNESS_SENTINEL, KURTOSIS_SENTINEL
    hist, _ = np.histogram(x, bins=TC_HIST_BINS, range=(-1.0, 1.0))
    probs = hist / hist.sum()
    nz = probs[probs > 0]
    entropy = float(-np.sum(nz * np.log2(nz)))
    return {"mean": mean, "std": std, "skewness": skew, "kurtosis": kurt,
            "entropy": entropy}


def temporal_coherence_features(seq: Sequence) -> dict[str, float]:
    """TC statistics per frame pair, summarized by mean and std across pairs."""
    if seq.frame_count < 2:
        raise ValueError("temporal coherence needs at least 2 frames")
    keys = ("mean", "std", "skewness", "kurtosis", "entropy")
    rows = {k: [] for k in keys}
    prev = None
    for frame in seq.frames():
        luma = frame.luma_normalized()
        if prev is not None:
            stats = _map_statistics(coherence_map(prev, luma))
            for k in keys:
                rows[k].append(stats[k])
        prev = luma
    out = {}
    for k in keys:
        arr = np.array(rows[k])
        out[f"tc_{k}_mean"] = float(arr.mean())
        out[f"tc_{k}_std"] = float(arr.std())
    return out


def glcm_features(seq: Sequence) -> dict[str, float]:
    """Frame-level GLCM descriptors summarized by mean and std across frames."""
    keys = ("contrast", "correlation", "homogeneity", "energy", "entropy")
    rows = {k: [] for k in keys}
    for frame in seq.frames():
        desc = glcm_descriptors(frame.y, frame.bit_depth)
        for k in keys:
            rows[k].append(desc[k])
    out = {}
    for k in keys:
        arr = np.array(rows[k])
        out[f"glcm_{k}_mean"] = float(arr.mean())
        out[f"glcm_{k}_std"] = float(arr.std())
    return out


def rsmse(seq: Sequence, target: Resolution) -> float:
    """MSE of the first luma frame after a down/up Lanczos round trip.

    The round trip runs through integer frames, exactly as the encode
    pipeline rescales video, so a constant frame comes back untouched.
    Values are on the peak-normalized scale, so 8-bit and 10-bit sources
    are directly comparable.
    """
    first = seq.frame(0)
    luma_only = Frame(y=first.y, u=None, v=None, bit_depth=first.bit_depth)
    native = Resolution(seq.width, seq.height, "native")
    down = lanczos3_resample(luma_only, target)
    back = lanczos3_resample(down, native)
    diff = (first.y.astype(np.float64) - back.y.astype(np.float64)) / first.peak
    return float(np.mean(diff * diff))


def _rescale_targets(seq: Sequence) -> tuple[Resolution, ...]:
    """Half, third and quarter scale; the ladder geometry for a 2160p source."""
    return tuple(
        Resolution(max(seq.width // k, 1), max(seq.height // k, 1), f"1/{k}")
        for k in (2, 3, 4)
    )


def extract_features(seq: Sequence) -> FeatureVector:
    """The full 23-value feature row for one sequence.

    Operates on native-resolution frames only; the only rescaling happens
    inside the rescale-MSE probe itself.
    """
    values = {}
    values.update(glcm_features(seq))
    values.update(temporal_coherence_features(seq))
    for name, target in zip(
        ("rescale_mse_half", "rescale_mse_third", "rescale_mse_quarter"),
        _rescale_targets(seq),
    ):
        values[name] = rsmse(seq, target)
    return FeatureVector(
        sequence_id=seq.seq_id,
        values=tuple(values[name] for name in FEATURE_NAMES),
    )
