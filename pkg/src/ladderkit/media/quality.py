"""Luma PSNR at display resolution, aggregated per GoP."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ladderkit.media.io import Sequence

#: Serialized stand-in for infinite PSNR on identical content.
PSNR_CAP_DB = 100.0

GOP_LENGTH = 16


@dataclass(frozen=True)
class PsnrReport:
    per_gop_db: tuple[float, ...]
    mean_db: float


def _to_db(mse: float, peak: int) -> float:
    if mse <= 0.0:
        return PSNR_CAP_DB
    return min(10.0 * math.log10(peak * peak / mse), PSNR_CAP_DB)


def psnr(reference: Sequence, distorted: Sequence, gop_length: int = GOP_LENGTH) -> PsnrReport:
    """Luma PSNR between equally-sized sequences.

    Frame MSEs are averaged within each gop_length window before conversion
    to dB; the sequence figure is the mean of the per-GoP dB values.
    Identical content reports the finite cap rather than infinity.
    """
    if (reference.width, reference.height) != (distorted.width, distorted.height):
        raise ValueError(
            f"dimension mismatch: {reference.width}x{reference.height} vs "
            f"{distorted.width}x{distorted.height}"
        )
    if reference.bit_depth != distorted.bit_depth:
        raise ValueError("bit depth mismatch")
    if reference.frame_count != distorted.frame_count:
        raise ValueError("frame count mismatch")

    peak = (1 << reference.bit_depth) - 1
    frame_mse = []
    for ref, dist in zip(reference.frames(), distorted.frames()):
        diff = ref.y.astype(np.float64) - dist.y.astype(np.float64)
        frame_mse.append(float(np.mean(diff * diff)))

    gops = [
        frame_mse[i : i + gop_length] for i in range(0, len(frame_mse), gop_length)
    ]
    per_gop = tuple(_to_db(float(np.mean(g)), peak) for g in gops)
    return PsnrReport(per_gop_db=per_gop, mean_db=float(np.mean(per_gop)))
