import math

import numpy as np
import pytest

from conftest import make_frame, make_sequence
from ladderkit.media.features import (
    FEATURE_NAMES,
    GLCM_LEVELS,
    coherence_map,
    extract_features,
    glcm_descriptors,
    rsmse,
    temporal_coherence_features,
)
from ladderkit.rq import Resolution


def checkerboard(h, w, a=64, b=192):
    board = np.fromfunction(lambda y, x: (y + x) % 2, (h, w))
    return np.where(board == 0, a, b)


class TestGlcm:
    def test_constant_frame_descriptors(self):
        desc = glcm_descriptors(np.full((64, 64), 123, dtype=np.uint8), 8)
        assert desc["contrast"] == 0.0
        assert desc["homogeneity"] == 1.0
        assert desc["energy"] == 1.0
        assert desc["entropy"] == 0.0
        assert desc["correlation"] == 1.0

    def test_checkerboard_contrast_hand_computed(self):
        # Values 64 and 192 quantize to levels 8 and 24 (top 5 of 8 bits),
        # gap g = 16. Horizontal and vertical neighbours always differ, the
        # two diagonals never do, so summing pair counts over the four
        # offsets on a 64x64 board:
        #   horizontal + vertical pairs: 2 * 64 * 63, contrast g^2 each
        #   diagonal pairs:              2 * 63 * 63, contrast 0
        h = w = 64
        n_hv = 2 * h * (w - 1)
        n_diag = 2 * (h - 1) * (w - 1)
        expected = 16**2 * n_hv / (n_hv + n_diag)
        desc = glcm_descriptors(checkerboard(h, w).astype(np.uint8), 8)
        assert desc["contrast"] == pytest.approx(expected, rel=1e-12)

    def test_uniform_noise_entropy_and_energy(self):
        # i.i.d. uniform pixels make the co-occurrence distribution close to
        # uniform over levels^2 cells
        entropies, energies = [], []
        for seed in range(10):
            rng = np.random.default_rng(seed)
            frame = rng.integers(0, 256, size=(256, 256), dtype=np.uint8)
            desc = glcm_descriptors(frame, 8)
            entropies.append(desc["entropy"])
            energies.append(desc["energy"])
        assert np.mean(entropies) == pytest.approx(
            math.log2(GLCM_LEVELS**2), rel=0.02
        )
        assert np.mean(energies) == pytest.approx(1 / GLCM_LEVELS**2, rel=0.02)

    def test_descriptor_ranges_on_random_frames(self):
        rng = np.random.default_rng(42)
        for _ in range(20):
            frame = rng.integers(0, 256, size=(48, 48), dtype=np.uint8)
            desc = glcm_descriptors(frame, 8)
            assert desc["contrast"] >= 0
            assert 0 < desc["energy"] <= 1
            assert 0 < desc["homogeneity"] <= 1
            assert desc["entropy"] >= 0
            assert -1 <= desc["correlation"] <= 1

    def test_ten_bit_quantization(self):
        lo, hi = 0, 1023
        frame = checkerboard(64, 64, lo, hi).astype(np.uint16)
        desc = glcm_descriptors(frame, 10)
        # levels 0 and 31: same structure as the 8-bit board
        n_hv = 2 * 64 * 63
        n_diag = 2 * 63 * 63
        assert desc["contrast"] == pytest.approx(31**2 * n_hv / (n_hv + n_diag))


class TestTemporalCoherence:
    def test_static_sequence(self):
        luma = np.tile(np.arange(64, dtype=np.uint8), (64, 1))
        seq = make_sequence([luma] * 4)
        feats = temporal_coherence_features(seq)
        assert feats["tc_mean_mean"] == pytest.approx(1.0)
        assert feats["tc_std_mean"] == pytest.approx(0.0)
        assert feats["tc_skewness_mean"] == 0.0
        assert feats["tc_kurtosis_mean"] == 3.0
        assert feats["tc_entropy_mean"] == pytest.approx(0.0)
        for k in ("mean", "std", "skewness", "kurtosis", "entropy"):
            assert feats[f"tc_{k}_std"] == pytest.approx(0.0)

    def test_static_constant_blocks_cohere(self):
        flat = np.full((64, 64), 77.0)
        cmap = coherence_map(flat, flat.copy())
        assert np.all(cmap == 1.0)

    def test_independent_noise_mean_near_zero(self):
        rng = np.random.default_rng(123)
        frames = [rng.integers(0, 256, size=(128, 128)) for _ in range(6)]
        seq = make_sequence(frames)
        feats = temporal_coherence_features(seq)
        assert abs(feats["tc_mean_mean"]) < 0.05

    def test_global_luma_shift_fully_coherent(self):
        rng = np.random.default_rng(5)
        base = rng.integers(60, 180, size=(64, 64))
        seq = make_sequence([base, base + 1])
        feats = temporal_coherence_features(seq)
        assert feats["tc_mean_mean"] == pytest.approx(1.0, abs=1e-12)

    def test_single_frame_rejected(self):
        seq = make_sequence([np.zeros((64, 64))])
        with pytest.raises(ValueError, match="2 frames"):
            temporal_coherence_features(seq)


class TestRescaleMse:
    def test_constant_frame_zero(self):
        seq = make_sequence([np.full((64, 64), 200)] * 2)
        assert rsmse(seq, Resolution(32, 32, "half")) == 0.0

    def test_smooth_content_survives_aliased_content_does_not(self):
        # period-64 sinusoid: far below the 2x-downscale Nyquist limit
        x = np.arange(256)
        sine = (127 + 100 * np.sin(2 * np.pi * x / 64))[None, :].repeat(256, 0)
        seq_sine = make_sequence([sine.astype(np.uint8)] * 2)
        seq_check = make_sequence([checkerboard(256, 256, 0, 255).astype(np.uint8)] * 2)
        target = Resolution(128, 128, "half")
        mse_sine = rsmse(seq_sine, target)
        mse_check = rsmse(seq_check, target)
        # spec'd tolerances are quoted on the 8-bit sample scale
        assert mse_sine * 255**2 < 0.5
        assert mse_check > 100 * mse_sine


class TestFeatureVector:
    def test_extraction_complete_and_deterministic(self):
        rng = np.random.default_rng(77)
        base = rng.integers(0, 250, size=(64, 64))
        frames = [np.clip(base + i, 0, 255) for i in range(4)]
        seq = make_sequence(frames, seq_id="demo")
        fv1 = extract_features(seq)
        fv2 = extract_features(seq)
        assert fv1 == fv2
        assert fv1.sequence_id == "demo"
        assert len(fv1.values) == 23
        assert len(FEATURE_NAMES) == 23
        assert all(np.isfinite(fv1.values))

    def test_named_access(self):
        seq = make_sequence([np.full((64, 64), 100)] * 2)
        fv = extract_features(seq)
        assert fv["glcm_energy_mean"] == 1.0
        assert fv["rescale_mse_half"] == 0.0
        assert fv["tc_mean_mean"] == 1.0
